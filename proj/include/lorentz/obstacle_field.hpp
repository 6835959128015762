#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "lorentz/errors.hpp"
#include "lorentz/geometry.hpp"
#include "lorentz/rng.hpp"

namespace lorentz {

/// One quenched draw of the Poisson obstacle field: frozen for the lifetime
/// of a trajectory, immutable after construction.
struct ObstacleConfiguration {
    std::vector<Vec> centers;
    Region region = Region::box(2, make_vec(0, 0), make_vec(1, 1));
    double intensity = 0.0;
    std::uint64_t seed = 0;

    std::size_t size() const { return centers.size(); }
};

/// N ~ Poisson(mu |Sigma|), then N centres i.i.d. uniform on the region.
/// The triple (region, mu, seed) fully determines the output.
inline ObstacleConfiguration sample_configuration(const Region& region, double mu,
                                                  std::uint64_t seed) {
    if (mu < 0.0) throw spec_error("sample_configuration: intensity must be >= 0");
    const double mean = mu * region.volume();
    if (mean > 1e9)
        throw numeric_guard_error(
            "sample_configuration: expected obstacle count " + std::to_string(mean) +
            " exceeds the 1e9 capacity guard");

    ObstacleConfiguration cfg;
    cfg.region = region;
    cfg.intensity = mu;
    cfg.seed = seed;
    if (mean == 0.0) return cfg;

    std::mt19937_64 rng = stream_engine(seed, 0);
    std::poisson_distribution<long> pois(mean);
    const long n = pois(rng);
    cfg.centers.reserve(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) cfg.centers.push_back(region.sample_uniform(rng));
    return cfg;
}

/// Uniform-grid spatial hash over the obstacle centres. For a periodic box
/// the cell count per axis divides the box exactly and lookups wrap.
class SpatialIndex {
  public:
    SpatialIndex(const ObstacleConfiguration& cfg, double cell_size) {
        if (!(cell_size > 0.0)) throw spec_error("SpatialIndex: cell size must be positive");
        dim_ = cfg.region.dim();
        periodic_ = cfg.region.periodic();
        const auto [lo, hi] = cfg.region.bounding_box();
        lo_ = lo;
        for (int a = 0; a < dim_; ++a) {
            const double extent = hi[a] - lo[a];
            n_[a] = std::max(1L, static_cast<long>(std::floor(extent / cell_size)));
            width_[a] = extent / static_cast<double>(n_[a]);
        }
        cell_size_ = std::min({width_[0], dim_ > 1 ? width_[1] : width_[0],
                               dim_ > 2 ? width_[2] : width_[0]});
        for (std::size_t i = 0; i < cfg.centers.size(); ++i)
            buckets_[key_of(cell_of(cfg.centers[i]))].push_back(static_cast<int>(i));
    }

    double cell_size() const { return cell_size_; }
    bool periodic() const { return periodic_; }

    /// Indices of all centres with |x - c| <= r (closed ball), ascending.
    std::vector<int> query(const ObstacleConfiguration& cfg, const Vec& x, double r) const {
        if (r > cell_size_ * (1.0 + 1e-12))
            throw spec_error("neighbors_within: query radius exceeds index cell size");
        std::vector<int> out;
        const std::array<long, 3> base = cell_of(x);
        const double r2 = r * r;
        std::array<long, 3> d{0, 0, 0};
        const long zlo = dim_ > 2 ? -1 : 0, zhi = dim_ > 2 ? 1 : 0;
        for (d[0] = -1; d[0] <= 1; ++d[0])
            for (d[1] = -1; d[1] <= 1; ++d[1])
                for (d[2] = zlo; d[2] <= zhi; ++d[2]) {
                    std::array<long, 3> cell{base[0] + d[0], base[1] + d[1], base[2] + d[2]};
                    if (periodic_)
                        for (int a = 0; a < dim_; ++a)
                            cell[a] = ((cell[a] % n_[a]) + n_[a]) % n_[a];
                    const auto it = buckets_.find(key_of(cell));
                    if (it == buckets_.end()) continue;
                    for (int idx : it->second) {
                        if (separation2(cfg.centers[static_cast<std::size_t>(idx)], x) <= r2)
                            out.push_back(idx);
                    }
                }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    /// Displacement x - c, minimum image if periodic.
    Vec displacement(const Vec& c, const Vec& x) const {
        Vec d = x - c;
        if (periodic_) {
            for (int a = 0; a < dim_; ++a) {
                const double L = width_[a] * static_cast<double>(n_[a]);
                d[a] -= L * std::round(d[a] / L);
            }
        }
        return d;
    }

    double separation2(const Vec& c, const Vec& x) const { return norm2(displacement(c, x)); }

  private:
    std::array<long, 3> cell_of(const Vec& p) const {
        std::array<long, 3> c{0, 0, 0};
        for (int a = 0; a < dim_; ++a) {
            long i = static_cast<long>(std::floor((p[a] - lo_[a]) / width_[a]));
            if (periodic_)
                i = ((i % n_[a]) + n_[a]) % n_[a];
            c[a] = i;
        }
        return c;
    }

    static std::uint64_t key_of(const std::array<long, 3>& c) {
        const std::uint64_t h0 = static_cast<std::uint64_t>(c[0]) * 0x9e3779b97f4a7c15ULL;
        const std::uint64_t h1 = static_cast<std::uint64_t>(c[1]) * 0xc2b2ae3d27d4eb4fULL;
        const std::uint64_t h2 = static_cast<std::uint64_t>(c[2]) * 0x165667b19e3779f9ULL;
        return h0 ^ (h1 + 0x9e3779b9u + (h0 << 6)) ^ (h2 << 1);
    }

    int dim_ = 2;
    bool periodic_ = false;
    Vec lo_{};
    std::array<long, 3> n_{1, 1, 1};
    std::array<double, 3> width_{1.0, 1.0, 1.0};
    double cell_size_ = 1.0;
    std::unordered_map<std::uint64_t, std::vector<int>> buckets_;
};

inline std::vector<int> neighbors_within(const ObstacleConfiguration& cfg,
                                         const SpatialIndex& index, const Vec& x, double r) {
    return index.query(cfg, x, r);
}

/// CSV export: one row per centre, columns c1..cd; region, intensity and seed
/// ride along as '#' comments so a file round-trips.
inline void write_configuration_csv(const ObstacleConfiguration& cfg, std::ostream& out) {
    char buf[512];
    const Region& R = cfg.region;
    if (R.kind() == Region::Kind::Box) {
        std::snprintf(buf, sizeof buf,
                      "# region=box dim=%d lo=%.17g,%.17g,%.17g hi=%.17g,%.17g,%.17g periodic=%d\n",
                      R.dim(), R.lo()[0], R.lo()[1], R.lo()[2], R.hi()[0], R.hi()[1], R.hi()[2],
                      R.periodic() ? 1 : 0);
    } else {
        std::snprintf(buf, sizeof buf, "# region=ball dim=%d center=%.17g,%.17g,%.17g radius=%.17g\n",
                      R.dim(), R.center()[0], R.center()[1], R.center()[2], R.radius());
    }
    out << buf;
    std::snprintf(buf, sizeof buf, "# intensity=%.17g seed=%llu\n", cfg.intensity,
                  static_cast<unsigned long long>(cfg.seed));
    out << buf;
    for (int a = 0; a < R.dim(); ++a) out << (a ? ",c" : "c") << a + 1;
    out << "\n";
    for (const Vec& c : cfg.centers) {
        for (int a = 0; a < R.dim(); ++a) {
            std::snprintf(buf, sizeof buf, a ? ",%.17g" : "%.17g", c[a]);
            out << buf;
        }
        out << "\n";
    }
}

inline void save_configuration_csv(const ObstacleConfiguration& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw spec_error("cannot open '" + path + "' for writing");
    write_configuration_csv(cfg, out);
}

inline ObstacleConfiguration read_configuration_csv(std::istream& in) {
    ObstacleConfiguration cfg;
    std::string line;
    int dim = 2;
    bool have_region = false;
    std::vector<Vec> centers;
    auto parse_triple = [](const std::string& s) {
        Vec v;
        std::istringstream ss(s);
        std::string item;
        for (int a = 0; a < 3 && std::getline(ss, item, ','); ++a) v[a] = std::stod(item);
        return v;
    };
    auto field = [](const std::string& l, const std::string& name) -> std::string {
        const auto pos = l.find(name + "=");
        if (pos == std::string::npos) throw spec_error("configuration csv: missing " + name);
        const auto start = pos + name.size() + 1;
        const auto end = l.find(' ', start);
        return l.substr(start, end == std::string::npos ? std::string::npos : end - start);
    };
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line.find("region=box") != std::string::npos) {
                dim = std::stoi(field(line, "dim"));
                cfg.region = Region::box(dim, parse_triple(field(line, "lo")),
                                         parse_triple(field(line, "hi")),
                                         field(line, "periodic") == "1");
                have_region = true;
            } else if (line.find("region=ball") != std::string::npos) {
                dim = std::stoi(field(line, "dim"));
                cfg.region = Region::ball(dim, parse_triple(field(line, "center")),
                                          std::stod(field(line, "radius")));
                have_region = true;
            } else if (line.find("intensity=") != std::string::npos) {
                cfg.intensity = std::stod(field(line, "intensity"));
                cfg.seed = std::stoull(field(line, "seed"));
            }
            continue;
        }
        if (line[0] == 'c') continue; // header row
        centers.push_back(parse_triple(line));
    }
    if (!have_region) throw spec_error("configuration csv: no region header");
    cfg.centers = std::move(centers);
    return cfg;
}

inline ObstacleConfiguration load_configuration_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw spec_error("cannot open '" + path + "'");
    return read_configuration_csv(in);
}

} // namespace lorentz
