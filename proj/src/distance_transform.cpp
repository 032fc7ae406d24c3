#include "rigmixer/sdf.hpp"

#include <algorithm>
#include <cmath>

namespace rigmixer {

namespace {

constexpr double kFar = 1e20;

// Felzenszwalb-Huttenlocher 1-D squared distance transform (lower envelope
// of parabolas). f holds squared distances, d receives the result.
void dt_1d(const double* f, double* d, int n, int* v, double* z) {
    int k = 0;
    v[0] = 0;
    z[0] = -kFar;
    z[1] = kFar;
    for (int q = 1; q < n; ++q) {
        double s = ((f[q] + static_cast<double>(q) * q) -
                    (f[v[k]] + static_cast<double>(v[k]) * v[k])) /
                   (2.0 * q - 2.0 * v[k]);
        while (s <= z[k]) {
            --k;
            s = ((f[q] + static_cast<double>(q) * q) -
                 (f[v[k]] + static_cast<double>(v[k]) * v[k])) /
                (2.0 * q - 2.0 * v[k]);
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = kFar;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) ++k;
        const double dq = q - v[k];
        d[q] = dq * dq + f[v[k]];
    }
}

// Squared Euclidean index-space distance to the nearest site, exactly
// (integer arithmetic carried in doubles).
std::vector<double> squared_edt(const VoxelGrid& vox, bool sites_are_occupied, Exec exec) {
    const int nx = vox.dims[0], ny = vox.dims[1], nz = vox.dims[2];
    std::vector<double> dist(vox.cell_count());
    for (size_t i = 0; i < dist.size(); ++i) {
        const bool site = vox.occupancy[i] != 0;
        dist[i] = (site == sites_are_occupied) ? 0.0 : kFar;
    }

    // Pass along x, rows indexed by (j, k).
    const long long nrows_x = static_cast<long long>(ny) * nz;
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
    for (long long r = 0; r < nrows_x; ++r) {
        const int j = static_cast<int>(r % ny);
        const int k = static_cast<int>(r / ny);
        std::vector<double> f(static_cast<size_t>(nx)), d(static_cast<size_t>(nx)), z(static_cast<size_t>(nx) + 1);
        std::vector<int> v(static_cast<size_t>(nx));
        for (int i = 0; i < nx; ++i) f[static_cast<size_t>(i)] = dist[vox.index(i, j, k)];
        dt_1d(f.data(), d.data(), nx, v.data(), z.data());
        for (int i = 0; i < nx; ++i) dist[vox.index(i, j, k)] = d[static_cast<size_t>(i)];
    }

    const long long nrows_y = static_cast<long long>(nx) * nz;
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
    for (long long r = 0; r < nrows_y; ++r) {
        const int i = static_cast<int>(r % nx);
        const int k = static_cast<int>(r / nx);
        std::vector<double> f(static_cast<size_t>(ny)), d(static_cast<size_t>(ny)), z(static_cast<size_t>(ny) + 1);
        std::vector<int> v(static_cast<size_t>(ny));
        for (int j = 0; j < ny; ++j) f[static_cast<size_t>(j)] = dist[vox.index(i, j, k)];
        dt_1d(f.data(), d.data(), ny, v.data(), z.data());
        for (int j = 0; j < ny; ++j) dist[vox.index(i, j, k)] = d[static_cast<size_t>(j)];
    }

    const long long nrows_z = static_cast<long long>(nx) * ny;
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
    for (long long r = 0; r < nrows_z; ++r) {
        const int i = static_cast<int>(r % nx);
        const int j = static_cast<int>(r / nx);
        std::vector<double> f(static_cast<size_t>(nz)), d(static_cast<size_t>(nz)), z(static_cast<size_t>(nz) + 1);
        std::vector<int> v(static_cast<size_t>(nz));
        for (int k = 0; k < nz; ++k) f[static_cast<size_t>(k)] = dist[vox.index(i, j, k)];
        dt_1d(f.data(), d.data(), nz, v.data(), z.data());
        for (int k = 0; k < nz; ++k) dist[vox.index(i, j, k)] = d[static_cast<size_t>(k)];
    }
    return dist;
}

} // namespace

SdfGrid signed_distance_transform(const VoxelGrid& vox, Exec exec) {
    SdfGrid out;
    out.dims = vox.dims;
    out.origin = vox.origin;
    out.spacing = vox.spacing;

    bool any_occupied = false, any_empty = false;
    for (uint8_t o : vox.occupancy) {
        if (o) {
            any_occupied = true;
        } else {
            any_empty = true;
        }
        if (any_occupied && any_empty) break;
    }
    if (!any_occupied) {
        out.coverage = GridCoverage::AllEmpty;
        out.values.assign(vox.cell_count(), kSdfSentinel);
        return out;
    }
    if (!any_empty) {
        out.coverage = GridCoverage::AllOccupied;
        out.values.assign(vox.cell_count(), -kSdfSentinel);
        return out;
    }

    const std::vector<double> to_occupied = squared_edt(vox, true, exec);
    const std::vector<double> to_empty = squared_edt(vox, false, exec);
    out.values.resize(vox.cell_count());
    const long long n = static_cast<long long>(vox.cell_count());
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
    for (long long i = 0; i < n; ++i) {
        const size_t s = static_cast<size_t>(i);
        out.values[s] = vox.occupancy[s] ? -vox.spacing * std::sqrt(to_empty[s])
                                         : vox.spacing * std::sqrt(to_occupied[s]);
    }
    return out;
}

} // namespace rigmixer
