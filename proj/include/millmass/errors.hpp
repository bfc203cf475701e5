#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace millmass {

// Base for every error raised by the library. Callers that only need a
// diagnostic can catch this; the subclasses identify the failing contract.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class DegeneratePolygon : public Error
{
public:
    using Error::Error;
};

class GridTooCoarse : public Error
{
public:
    using Error::Error;
};

class MassUnderflow : public Error
{
public:
    using Error::Error;
};

class VolumeUnderflow : public Error
{
public:
    using Error::Error;
};

class OutOfMemoryBudget : public Error
{
public:
    using Error::Error;
};

class IncompatibleInputs : public Error
{
public:
    using Error::Error;
};

class UnsupportedMotion : public Error
{
public:
    UnsupportedMotion(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line)
    {
    }
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ParseError : public Error
{
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line)
    {
    }
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Configuration schema violation; `path` is a JSON pointer such as "/tool/diameter_mm".
class ConfigError : public Error
{
public:
    ConfigError(const std::string& path, const std::string& what)
        : Error(path + ": " + what), path_(path)
    {
    }
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

// Raised by the path simulation with the index of the step that failed.
class StepError : public Error
{
public:
    StepError(std::size_t step, const std::string& what)
        : Error("step " + std::to_string(step) + ": " + what), step_(step)
    {
    }
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

} // namespace millmass
