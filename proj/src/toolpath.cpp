#include "millmass/toolpath.hpp"

#include "millmass/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace millmass {

namespace {

std::string trim(std::string_view s)
{
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b])))
        ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])))
        --e;
    return std::string(s.substr(b, e - b));
}

bool parse_double(std::string_view text, double& out)
{
    const std::string t = trim(text);
    if (t.empty())
        return false;
    const char* first = t.data();
    if (*first == '+')
        ++first;
    const auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), out);
    return ec == std::errc() && ptr == t.data() + t.size() && std::isfinite(out);
}

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line)
    {
        if (ch == sep)
        {
            out.push_back(trim(cur));
            cur.clear();
        }
        else
            cur.push_back(ch);
    }
    out.push_back(trim(cur));
    return out;
}

std::string format_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

} // namespace

double ToolPath::length() const
{
    double s = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i)
        s += norm(points[i].position - points[i - 1].position);
    return s;
}

std::vector<double> ToolPath::arc_lengths() const
{
    std::vector<double> s(points.size(), 0.0);
    for (std::size_t i = 1; i < points.size(); ++i)
        s[i] = s[i - 1] + norm(points[i].position - points[i - 1].position);
    return s;
}

std::optional<std::vector<double>> ToolPath::times() const
{
    if (points.empty())
        return std::nullopt;
    std::vector<double> t(points.size(), 0.0);
    for (std::size_t i = 1; i < points.size(); ++i)
    {
        const auto& f = points[i].feed;
        if (!f || !(*f > 0.0))
            return std::nullopt;
        t[i] = t[i - 1] + norm(points[i].position - points[i - 1].position) / (*f / 60.0);
    }
    return t;
}

void collapse_duplicates(ToolPath& path)
{
    std::vector<ToolPosition> out;
    out.reserve(path.points.size());
    for (const auto& p : path.points)
    {
        if (!out.empty() && out.back().position == p.position)
        {
            if (p.feed)
                out.back().feed = p.feed;
            continue;
        }
        out.push_back(p);
    }
    path.points = std::move(out);
}

ToolPath parse_path_csv(std::istream& in, const std::string& source)
{
    ToolPath path;
    path.source = source;
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    bool has_feed = false;
    while (std::getline(in, line))
    {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#')
            continue;
        const auto cells = split(t, ',');
        if (!have_header)
        {
            if (cells.size() < 3 || cells[0] != "x_mm" || cells[1] != "y_mm" || cells[2] != "z_mm" ||
                cells.size() > 4 || (cells.size() == 4 && cells[3] != "f_mm_min"))
                throw ParseError(lineno, "expected header x_mm,y_mm,z_mm[,f_mm_min]");
            has_feed = cells.size() == 4;
            have_header = true;
            continue;
        }
        if (cells.size() < 3 || cells.size() > (has_feed ? 4u : 3u))
            throw ParseError(lineno, "wrong number of fields");
        ToolPosition tp;
        double* dst[3] = {&tp.position.x, &tp.position.y, &tp.position.z};
        for (std::size_t k = 0; k < 3; ++k)
            if (!parse_double(cells[k], *dst[k]))
                throw ParseError(lineno, "invalid number '" + cells[k] + "'");
        if (cells.size() == 4 && !cells[3].empty())
        {
            double f = 0.0;
            if (!parse_double(cells[3], f) || f <= 0.0)
                throw ParseError(lineno, "invalid feed '" + cells[3] + "'");
            tp.feed = f;
        }
        path.points.push_back(tp);
    }
    if (!have_header)
        throw ParseError(lineno, "missing CSV header");
    if (path.points.empty())
        throw ParseError(lineno, "path has no positions");
    collapse_duplicates(path);
    return path;
}

ToolPath parse_path_gcode(std::istream& in, const std::string& source)
{
    ToolPath path;
    path.source = source;
    Vec3 pos;
    std::optional<double> feed;
    int motion = 0;  // modal G0/G1
    std::string line;
    std::size_t lineno = 0;

    while (std::getline(in, line))
    {
        ++lineno;
        // Strip comments: "( ... )" and everything after ';'.
        std::string code;
        int depth = 0;
        for (char ch : line)
        {
            if (ch == ';' && depth == 0)
                break;
            if (ch == '(')
                ++depth;
            else if (ch == ')' && depth > 0)
                --depth;
            else if (depth == 0)
                code.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(ch))));
        }

        bool moved = false;
        std::vector<std::string> ignored;
        std::size_t i = 0;
        while (i < code.size())
        {
            if (std::isspace(static_cast<unsigned char>(code[i])) || code[i] == '%')
            {
                ++i;
                continue;
            }
            const char letter = code[i++];
            if (!std::isalpha(static_cast<unsigned char>(letter)))
                throw ParseError(lineno, std::string("unexpected character '") + letter + "'");
            std::size_t j = i;
            while (j < code.size() && (std::isdigit(static_cast<unsigned char>(code[j])) || code[j] == '.' ||
                                       code[j] == '-' || code[j] == '+' || code[j] == ' '))
            {
                if (code[j] == ' ' && j + 1 < code.size() && std::isalpha(static_cast<unsigned char>(code[j + 1])))
                    break;
                ++j;
            }
            double value = 0.0;
            if (!parse_double(std::string_view(code).substr(i, j - i), value))
                throw ParseError(lineno, std::string("invalid value for word '") + letter + "'");
            i = j;

            switch (letter)
            {
            case 'G': {
                const int g = static_cast<int>(std::lround(value * 10.0));
                if (g == 0 || g == 10)
                    motion = g / 10;
                else if (g == 20 || g == 30)
                    throw UnsupportedMotion(lineno, "circular interpolation (G2/G3) is not supported");
                else if (g == 910)
                    throw UnsupportedMotion(lineno, "incremental positioning (G91) is not supported");
                else if (g == 200)
                    throw UnsupportedMotion(lineno, "inch units (G20) are not supported");
                else if (g != 900 && g != 210)
                    ignored.push_back("G" + format_double(value));
                break;
            }
            case 'X':
                pos.x = value;
                moved = true;
                break;
            case 'Y':
                pos.y = value;
                moved = true;
                break;
            case 'Z':
                pos.z = value;
                moved = true;
                break;
            case 'F':
                if (!(value > 0.0))
                    throw ParseError(lineno, "feed must be positive");
                feed = value;
                break;
            case 'I':
            case 'J':
            case 'K':
            case 'R':
                throw UnsupportedMotion(lineno, "arc parameters are not supported");
            default:
                ignored.push_back(std::string(1, letter) + format_double(value));
                break;
            }
        }
        for (const auto& w : ignored)
            path.warnings.push_back("line " + std::to_string(lineno) + ": ignored word " + w);
        if (moved)
        {
            ToolPosition tp{pos, std::nullopt};
            if (motion == 1)
                tp.feed = feed;
            path.points.push_back(tp);
        }
    }
    if (path.points.empty())
        throw ParseError(lineno, "program contains no G0/G1 positions");
    collapse_duplicates(path);
    return path;
}

ToolPath load_path(const std::filesystem::path& file)
{
    std::ifstream in(file);
    if (!in)
        throw ParseError(0, "cannot open '" + file.string() + "'");
    std::string first;
    std::streampos start = in.tellg();
    std::string line;
    while (std::getline(in, line))
    {
        const std::string t = trim(line);
        if (!t.empty() && t.front() != '#')
        {
            first = t;
            break;
        }
    }
    in.clear();
    in.seekg(start);
    if (first.rfind("x_mm", 0) == 0)
        return parse_path_csv(in, file.string());
    return parse_path_gcode(in, file.string());
}

void write_path_csv(std::ostream& out, const ToolPath& path)
{
    const bool feed = std::any_of(path.points.begin(), path.points.end(), [](const auto& p) { return p.feed.has_value(); });
    out << (feed ? "x_mm,y_mm,z_mm,f_mm_min\n" : "x_mm,y_mm,z_mm\n");
    for (const auto& p : path.points)
    {
        out << format_double(p.position.x) << ',' << format_double(p.position.y) << ','
            << format_double(p.position.z);
        if (feed)
        {
            out << ',';
            if (p.feed)
                out << format_double(*p.feed);
        }
        out << '\n';
    }
}

ToolPath resample(const ToolPath& path, double step)
{
    if (!(step > 0.0))
        throw std::invalid_argument("resample step must be positive");
    ToolPath out;
    out.source = path.source;
    out.warnings = path.warnings;
    out.resample_step = step;
    if (path.points.empty())
        return out;
    out.points.push_back(path.points.front());
    for (std::size_t i = 1; i < path.points.size(); ++i)
    {
        const Vec3 a = path.points[i - 1].position;
        const Vec3 b = path.points[i].position;
        const double len = norm(b - a);
        const auto pieces = static_cast<std::size_t>(std::max(1.0, std::ceil(len / step - 1e-9)));
        for (std::size_t k = 1; k < pieces; ++k)
        {
            const double t = static_cast<double>(k) / static_cast<double>(pieces);
            out.points.push_back({a + (b - a) * t, path.points[i].feed});
        }
        out.points.push_back(path.points[i]);
    }
    return out;
}

} // namespace millmass
