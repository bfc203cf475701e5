#include "millmass/oracle.hpp"

#include "millmass/errors.hpp"
#include "millmass/parallel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace millmass {

namespace {

constexpr std::array<std::uint64_t, 6> kBitMasks{
    0xAAAAAAAAAAAAAAAAULL, 0xCCCCCCCCCCCCCCCCULL, 0xF0F0F0F0F0F0F0F0ULL,
    0xFF00FF00FF00FF00ULL, 0xFFFF0000FFFF0000ULL, 0xFFFFFFFF00000000ULL,
};

// Sum of the bit positions set in x.
std::uint64_t bit_index_sum(std::uint64_t x)
{
    std::uint64_t s = 0;
    for (std::size_t b = 0; b < kBitMasks.size(); ++b)
        s += static_cast<std::uint64_t>(std::popcount(x & kBitMasks[b])) << b;
    return s;
}

void add_word(VoxelSums& s, std::uint64_t x, int i, int j, int w)
{
    const auto pc = static_cast<std::uint64_t>(std::popcount(x));
    if (pc == 0)
        return;
    s.count += pc;
    s.si += pc * static_cast<std::uint64_t>(i);
    s.sj += pc * static_cast<std::uint64_t>(j);
    s.sk += pc * static_cast<std::uint64_t>(w) * 64u + bit_index_sum(x);
}

std::uint64_t range_mask(int lo, int hi)  // bits lo..hi inclusive, 0 <= lo <= hi < 64
{
    const std::uint64_t upper = hi == 63 ? ~0ULL : ((1ULL << (hi + 1)) - 1);
    return upper & ~((1ULL << lo) - 1);
}

void set_range(std::uint64_t* col, int k0, int k1)
{
    for (int w = k0 / 64; w <= k1 / 64; ++w)
        col[w] |= range_mask(std::max(k0, w * 64) - w * 64, std::min(k1, w * 64 + 63) - w * 64);
}

void clear_range(std::uint64_t* col, int k0, int k1, int i, int j, VoxelSums& removed)
{
    for (int w = k0 / 64; w <= k1 / 64; ++w)
    {
        const std::uint64_t m = range_mask(std::max(k0, w * 64) - w * 64, std::min(k1, w * 64 + 63) - w * 64);
        add_word(removed, col[w] & m, i, j, w);
        col[w] &= ~m;
    }
}

struct TRange
{
    double t0 = 0.0;
    double t1 = -1.0;
    bool empty() const { return t1 < t0; }
};

TRange intersect(TRange a, TRange b) { return {std::max(a.t0, b.t0), std::min(a.t1, b.t1)}; }

// Parameters t in [0,1] for which q (relative to the start tip) lies within
// `radius` of the tool axis line through t * d, axis direction u.
TRange radial_range(const Vec3& q, const Vec3& d, const Vec3& u, double radius)
{
    const Vec3 qp = q - u * dot(q, u);
    const Vec3 dp = d - u * dot(d, u);
    const double ee = dot(dp, dp);
    const double qq = dot(qp, qp);
    const double r2 = radius * radius;
    if (ee < 1e-24)
        return qq <= r2 ? TRange{0.0, 1.0} : TRange{};
    const double tc = dot(qp, dp) / ee;
    const double disc = r2 - (qq - tc * tc * ee);
    if (disc < 0.0)
        return {};
    const double s = std::sqrt(disc / ee);
    return intersect({tc - s, tc + s}, {0.0, 1.0});
}

// Parameters t for which the axial coordinate of q above the moving tip lies in [0, length].
TRange axial_range(const Vec3& q, const Vec3& d, const Vec3& u, double length)
{
    const double qu = dot(q, u);
    const double du = dot(d, u);
    if (std::abs(du) < 1e-15)
        return qu >= 0.0 && qu <= length ? TRange{0.0, 1.0} : TRange{};
    const double ta = (qu - length) / du;
    const double tb = qu / du;
    return {std::min(ta, tb), std::max(ta, tb)};
}

int clamp_index(double v, int hi)
{
    if (v < 0.0)
        return 0;
    if (v > hi)
        return hi;
    return static_cast<int>(v);
}

VoxelSums reduce(std::vector<VoxelSums>& parts)
{
    VoxelSums s;
    for (const auto& p : parts)
        s += p;
    return s;
}

// Tool axis parallel to the grid k axis: each column needs one parameter range.
VoxelSums carve_columns(VoxelGrid& g, const Vec3& a, const Vec3& b, double radius, double length)
{
    const double h = g.spacing;
    const Vec3 d = b - a;
    const int i0 = clamp_index(std::floor((std::min(a.x, b.x) - radius - g.origin.x) / h), g.nx - 1);
    const int i1 = clamp_index(std::floor((std::max(a.x, b.x) + radius - g.origin.x) / h), g.nx - 1);
    const int j0 = clamp_index(std::floor((std::min(a.y, b.y) - radius - g.origin.y) / h), g.ny - 1);
    const int j1 = clamp_index(std::floor((std::max(a.y, b.y) + radius - g.origin.y) / h), g.ny - 1);
    const Vec3 ez{0.0, 0.0, 1.0};
    const Vec3 dxy{d.x, d.y, 0.0};

    std::vector<VoxelSums> parts(worker_count());
    parallel_chunks(static_cast<std::size_t>(j1 - j0 + 1), [&](std::size_t begin, std::size_t end, std::size_t w) {
        VoxelSums& part = parts[w];
        for (auto jj = begin; jj < end; ++jj)
        {
            const int j = j0 + static_cast<int>(jj);
            const double y = g.origin.y + (j + 0.5) * h;
            for (int i = i0; i <= i1; ++i)
            {
                const double x = g.origin.x + (i + 0.5) * h;
                const TRange t = radial_range({x - a.x, y - a.y, 0.0}, dxy, ez, radius);
                if (t.empty())
                    continue;
                const double za = a.z + t.t0 * d.z;
                const double zb = a.z + t.t1 * d.z;
                const double lo = std::min(za, zb);
                const double hi = std::max(za, zb) + length;
                const double k0f = std::ceil((lo - g.origin.z) / h - 0.5);
                const double k1f = std::floor((hi - g.origin.z) / h - 0.5);
                if (k1f < 0.0 || k0f > g.nz - 1 || k1f < k0f)
                    continue;
                const int k0 = static_cast<int>(std::max(k0f, 0.0));
                const int k1 = static_cast<int>(std::min(k1f, static_cast<double>(g.nz - 1)));
                clear_range(g.column(i, j), k0, k1, i, j, part);
            }
        }
    });
    return reduce(parts);
}

// Inclined tool axis: per-voxel test over the grid bounds of the sweep.
VoxelSums carve_voxels(VoxelGrid& g, const Vec3& a, const Vec3& b, const Vec3& u, double radius, double length)
{
    const double h = g.spacing;
    const Vec3 d = b - a;
    // Machine-frame bounding box of the sweep, mapped to grid bounds.
    const Vec3 ma = g.frame.apply(a);
    const Vec3 mb = g.frame.apply(b);
    const Vec3 mu = g.frame.apply_direction(u);
    Vec3 lo{std::numeric_limits<double>::max(), std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
    Vec3 hi = lo * -1.0;
    for (const Vec3& base : {ma, mb, ma + mu * length, mb + mu * length})
    {
        lo = {std::min(lo.x, base.x - radius), std::min(lo.y, base.y - radius), std::min(lo.z, base.z - radius)};
        hi = {std::max(hi.x, base.x + radius), std::max(hi.y, base.y + radius), std::max(hi.z, base.z + radius)};
    }
    Vec3 glo{1e300, 1e300, 1e300};
    Vec3 ghi = glo * -1.0;
    for (int c = 0; c < 8; ++c)
    {
        const Vec3 m{(c & 1) ? hi.x : lo.x, (c & 2) ? hi.y : lo.y, (c & 4) ? hi.z : lo.z};
        const Vec3 p = g.frame.inverse_apply(m);
        glo = {std::min(glo.x, p.x), std::min(glo.y, p.y), std::min(glo.z, p.z)};
        ghi = {std::max(ghi.x, p.x), std::max(ghi.y, p.y), std::max(ghi.z, p.z)};
    }
    const int i0 = clamp_index(std::floor((glo.x - g.origin.x) / h), g.nx - 1);
    const int i1 = clamp_index(std::floor((ghi.x - g.origin.x) / h), g.nx - 1);
    const int j0 = clamp_index(std::floor((glo.y - g.origin.y) / h), g.ny - 1);
    const int j1 = clamp_index(std::floor((ghi.y - g.origin.y) / h), g.ny - 1);
    const int k0 = clamp_index(std::floor((glo.z - g.origin.z) / h), g.nz - 1);
    const int k1 = clamp_index(std::floor((ghi.z - g.origin.z) / h), g.nz - 1);

    std::vector<VoxelSums> parts(worker_count());
    parallel_chunks(static_cast<std::size_t>(j1 - j0 + 1), [&](std::size_t begin, std::size_t end, std::size_t w) {
        VoxelSums& part = parts[w];
        for (auto jj = begin; jj < end; ++jj)
        {
            const int j = j0 + static_cast<int>(jj);
            for (int i = i0; i <= i1; ++i)
            {
                std::uint64_t* col = g.column(i, j);
                for (int k = k0; k <= k1; ++k)
                {
                    const std::uint64_t bit = 1ULL << (k % 64);
                    if (!(col[k / 64] & bit))
                        continue;
                    const Vec3 q = g.origin + Vec3{(i + 0.5) * h, (j + 0.5) * h, (k + 0.5) * h} - a;
                    const TRange t = intersect(radial_range(q, d, u, radius),
                                               intersect(axial_range(q, d, u, length), {0.0, 1.0}));
                    if (t.empty())
                        continue;
                    col[k / 64] &= ~bit;
                    ++part.count;
                    part.si += static_cast<std::uint64_t>(i);
                    part.sj += static_cast<std::uint64_t>(j);
                    part.sk += static_cast<std::uint64_t>(k);
                }
            }
        }
    });
    return reduce(parts);
}

} // namespace

bool VoxelGrid::test(int i, int j, int k) const
{
    return (column(i, j)[k / 64] >> (k % 64)) & 1u;
}

Vec3 VoxelGrid::voxel_center(int i, int j, int k) const
{
    return frame.apply(origin + Vec3{(i + 0.5) * spacing, (j + 0.5) * spacing, (k + 0.5) * spacing});
}

VoxelSums VoxelGrid::sums() const
{
    std::vector<VoxelSums> parts(worker_count());
    parallel_chunks(static_cast<std::size_t>(ny), [&](std::size_t begin, std::size_t end, std::size_t w) {
        for (auto j = begin; j < end; ++j)
            for (int i = 0; i < nx; ++i)
            {
                const std::uint64_t* col = column(i, static_cast<int>(j));
                for (int k = 0; k < words; ++k)
                    add_word(parts[w], col[k], i, static_cast<int>(j), k);
            }
    });
    return reduce(parts);
}

double VoxelGrid::volume() const
{
    return static_cast<double>(sums().count) * voxel_volume();
}

Vec3 VoxelGrid::centroid(const VoxelSums& s) const
{
    if (s.count == 0)
        throw std::invalid_argument("centroid of an empty voxel set");
    const double c = static_cast<double>(s.count);
    const Vec3 idx{static_cast<double>(s.si) / c, static_cast<double>(s.sj) / c, static_cast<double>(s.sk) / c};
    return frame.apply(origin + (idx + Vec3{0.5, 0.5, 0.5}) * spacing);
}

VoxelGrid make_voxel_grid(const BoxStock& stock, double spacing, double density, std::uint64_t max_cells,
                          GridLayout layout)
{
    if (!(spacing > 0.0) || !std::isfinite(spacing))
        throw std::invalid_argument("voxel spacing must be positive");
    if (!(density > 0.0))
        throw std::invalid_argument("density must be positive");
    if (!(stock.dims.x > 0.0 && stock.dims.y > 0.0 && stock.dims.z > 0.0))
        throw std::invalid_argument("box dimensions must be positive");

    VoxelGrid g;
    g.spacing = spacing;
    g.density = density;
    Vec3 lo, hi;
    if (layout == GridLayout::Workpiece)
    {
        g.frame = stock.placement;
        hi = stock.dims;
    }
    else
    {
        const auto corners = stock.corners();
        lo = hi = corners[0];
        for (const auto& c : corners)
        {
            lo = {std::min(lo.x, c.x), std::min(lo.y, c.y), std::min(lo.z, c.z)};
            hi = {std::max(hi.x, c.x), std::max(hi.y, c.y), std::max(hi.z, c.z)};
        }
    }
    g.origin = lo - Vec3{spacing, spacing, spacing};
    const auto count = [&](double extent) { return static_cast<std::uint64_t>(std::ceil(extent / spacing - 1e-9)) + 2; };
    const std::uint64_t nx = count(hi.x - lo.x);
    const std::uint64_t ny = count(hi.y - lo.y);
    const std::uint64_t nz = count(hi.z - lo.z);
    const std::uint64_t words = (nz + 63) / 64;
    if (nx * ny * words * 64 > max_cells || nx > 1u << 30 || ny > 1u << 30 || nz > 1u << 30)
        throw OutOfMemoryBudget("voxel grid of " + std::to_string(nx) + "x" + std::to_string(ny) + "x" +
                                std::to_string(nz) + " cells exceeds the budget of " + std::to_string(max_cells));
    g.nx = static_cast<int>(nx);
    g.ny = static_cast<int>(ny);
    g.nz = static_cast<int>(nz);
    g.words = static_cast<int>(words);
    g.bits.assign(nx * ny * words, 0);

    // Each grid column is a line along the grid k axis; clip it against the box slabs.
    const Vec3 dl = stock.placement.inverse_direction(g.frame.apply_direction({0.0, 0.0, 1.0}));
    parallel_for(ny, [&](std::size_t jj) {
        const int j = static_cast<int>(jj);
        for (int i = 0; i < g.nx; ++i)
        {
            const Vec3 base{g.origin.x + (i + 0.5) * spacing, g.origin.y + (j + 0.5) * spacing, 0.0};
            const Vec3 l0 = stock.placement.inverse_apply(g.frame.apply(base));
            double zlo = -std::numeric_limits<double>::infinity();
            double zhi = std::numeric_limits<double>::infinity();
            const double p0[3] = {l0.x, l0.y, l0.z};
            const double dd[3] = {dl.x, dl.y, dl.z};
            const double ext[3] = {stock.dims.x, stock.dims.y, stock.dims.z};
            bool inside = true;
            for (int c = 0; c < 3 && inside; ++c)
            {
                if (std::abs(dd[c]) < 1e-15)
                {
                    inside = p0[c] >= 0.0 && p0[c] <= ext[c];
                    continue;
                }
                const double ta = (0.0 - p0[c]) / dd[c];
                const double tb = (ext[c] - p0[c]) / dd[c];
                zlo = std::max(zlo, std::min(ta, tb));
                zhi = std::min(zhi, std::max(ta, tb));
            }
            if (!inside || zhi < zlo)
                continue;
            const double k0f = std::ceil((zlo - g.origin.z) / spacing - 0.5);
            const double k1f = std::floor((zhi - g.origin.z) / spacing - 0.5);
            const int k0 = static_cast<int>(std::max(k0f, 0.0));
            const int k1 = static_cast<int>(std::min(k1f, static_cast<double>(g.nz - 1)));
            if (k1 >= k0)
                set_range(g.column(i, j), k0, k1);
        }
    });
    return g;
}

OracleResult voxel_carve_path(VoxelGrid& grid, const Tool& tool, const ToolPath& path, double depth_limit)
{
    tool.validate();
    const double length = depth_limit > 0.0 ? depth_limit : tool.flute_length;
    const double radius = tool.radius();

    OracleResult r;
    r.spacing = grid.spacing;
    r.density = grid.density;
    r.cells = grid.cells();
    const VoxelSums before = grid.sums();
    r.volume_before = static_cast<double>(before.count) * grid.voxel_volume();
    r.mass_before = grid.density * r.volume_before;
    if (before.count > 0)
        r.com_before = grid.centroid(before);

    const Vec3 u = grid.frame.inverse_direction({0.0, 0.0, 1.0});
    const bool column_aligned = std::abs(u.x) < 1e-12 && std::abs(u.y) < 1e-12 && u.z > 0.0;

    VoxelSums removed;
    for (std::size_t n = 0; n + 1 < path.size(); ++n)
    {
        const Vec3 a = grid.frame.inverse_apply(path.points[n].position);
        const Vec3 b = grid.frame.inverse_apply(path.points[n + 1].position);
        const VoxelSums s =
            column_aligned ? carve_columns(grid, a, b, radius, length) : carve_voxels(grid, a, b, u, radius, length);
        removed += s;
        r.step_volume.push_back(static_cast<double>(s.count) * grid.voxel_volume());
    }

    r.removed_volume = static_cast<double>(removed.count) * grid.voxel_volume();
    r.removed_mass = grid.density * r.removed_volume;
    const VoxelSums after{before.count - removed.count, before.si - removed.si, before.sj - removed.sj,
                          before.sk - removed.sk};
    r.com_after = after.count > 0 ? grid.centroid(after) : r.com_before;
    r.com_shift = norm(r.com_after - r.com_before);
    return r;
}

double relative_error(double model, double ref)
{
    const double diff = std::abs(model - ref);
    if (ref == 0.0)
        return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return diff / std::abs(ref);
}

CompareReport compare(const LookupTable& model, const OracleResult& oracle)
{
    if (model.rows.empty())
        throw IncompatibleInputs("model table has no rows");
    if (!(model.density > 0.0))
        throw IncompatibleInputs("model table carries no density");
    const double v_model = model.rows.front().mass / model.density;
    if (relative_error(v_model, oracle.volume_before) > 0.01)
        throw IncompatibleInputs("initial volumes differ by more than 1%: model " + std::to_string(v_model) +
                                 " mm^3, oracle " + std::to_string(oracle.volume_before) + " mm^3");

    CompareReport rep;
    const auto& first = model.rows.front();
    const auto& last = model.rows.back();
    rep.dm_model = first.mass - last.mass;
    rep.dm_oracle = oracle.removed_mass;
    rep.e_dm = relative_error(rep.dm_model, rep.dm_oracle);
    rep.dc_model = norm(last.com - first.com);
    rep.dc_oracle = oracle.com_shift;
    rep.e_dc = relative_error(rep.dc_model, rep.dc_oracle);

    if (oracle.step_volume.size() + 1 == model.rows.size())
    {
        double cum = 0.0;
        for (std::size_t n = 0; n < oracle.step_volume.size(); ++n)
        {
            cum += oracle.step_volume[n] * oracle.density;
            CompareStep s;
            s.n = n + 1;
            s.dm_model = first.mass - model.rows[n + 1].mass;
            s.dm_oracle = cum;
            s.residual = s.dm_model - s.dm_oracle;
            rep.per_step.push_back(s);
        }
    }
    return rep;
}

} // namespace millmass
