#include "millmass/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace millmass {

namespace {
std::atomic<std::size_t> g_override{0};
}

std::size_t worker_count()
{
    if (const std::size_t o = g_override.load())
        return o;
    if (const char* env = std::getenv("MILLMASS_THREADS"))
    {
        try
        {
            const long v = std::stol(env);
            if (v > 0)
                return static_cast<std::size_t>(v);
        }
        catch (...)
        {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void set_worker_count(std::size_t n)
{
    g_override.store(n);
}

} // namespace millmass
