// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 rpnsel contributors
//
// Synthetic geometric wideband channel: single-bounce scattering over
// uniformly placed scatterers, distance pathloss with a 1 m free-space
// reference, per-link log-normal shadow fading, and line-of-sight paths
// blocked by axis-aligned rectangular obstacles. Deterministic per seed.

#pragma once

#include "rpnsel/numerics.hpp"
#include "rpnsel/rng.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rpnsel {

inline constexpr double kSpeedOfLight = 299792458.0;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline double distance(const Vec2& a, const Vec2& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

// Axis-aligned rectangle used as an opaque obstacle.
struct Obstacle {
    double xmin = 0.0, ymin = 0.0, xmax = 0.0, ymax = 0.0;

    // Liang-Barsky clip: true when the open segment a-b passes through the
    // rectangle interior (touching an edge exactly does not block).
    bool blocks(const Vec2& a, const Vec2& b) const {
        const double dx = b.x - a.x;
        const double dy = b.y - a.y;
        double t0 = 0.0, t1 = 1.0;
        const double p[4] = {-dx, dx, -dy, dy};
        const double q[4] = {a.x - xmin, xmax - a.x, a.y - ymin, ymax - a.y};
        for (int i = 0; i < 4; ++i) {
            if (p[i] == 0.0) {
                if (q[i] < 0.0) return false;  // parallel and outside
            } else {
                const double r = q[i] / p[i];
                if (p[i] < 0.0) {
                    if (r > t1) return false;
                    if (r > t0) t0 = r;
                } else {
                    if (r < t0) return false;
                    if (r < t1) t1 = r;
                }
            }
        }
        return t1 - t0 > 1e-12;
    }
};

struct SceneConfig {
    double area_x_m = 500.0;
    double area_y_m = 500.0;
    int n_tx = 64;
    int n_users = 16;
    int n_scatterers = 75;
    int n_obstacles = 1;
    double carrier_hz = 2.6e9;
    double bandwidth_hz = 20e6;
    int n_subcarriers = 64;
    double shadow_sigma_db = 8.0;
    double pathloss_exponent = 3.5;
    double obstacle_extent_frac = 0.2;  // obstacle side length as a fraction of the area side
    std::uint64_t seed = 1;

    // Optional fixed placements; empty means uniform random placement.
    std::vector<Vec2> tx_positions;
    std::vector<Vec2> user_positions;

    void check() const {
        if (area_x_m <= 0.0 || area_y_m <= 0.0)
            throw std::invalid_argument("SceneConfig: area dimensions must be positive");
        if (n_tx < 1 || n_users < 1 || n_subcarriers < 1)
            throw std::invalid_argument("SceneConfig: counts must be >= 1");
        if (n_scatterers < 0 || n_obstacles < 0)
            throw std::invalid_argument("SceneConfig: negative scatterer/obstacle count");
        if (carrier_hz <= 0.0 || bandwidth_hz <= 0.0)
            throw std::invalid_argument("SceneConfig: carrier and bandwidth must be positive");
        if (shadow_sigma_db < 0.0)
            throw std::invalid_argument("SceneConfig: shadow sigma must be >= 0 dB");
        if (!tx_positions.empty() && static_cast<int>(tx_positions.size()) != n_tx)
            throw std::invalid_argument("SceneConfig: tx_positions size != n_tx");
        if (!user_positions.empty() && static_cast<int>(user_positions.size()) != n_users)
            throw std::invalid_argument("SceneConfig: user_positions size != n_users");
    }
};

// Complex channel coefficients indexed (subcarrier, tx antenna, user), with
// the geometry that produced them retained as metadata.
struct ChannelTensor {
    std::vector<ComplexMatrix> subcarriers;     // each n_tx x n_users
    std::vector<double> subcarrier_freqs_hz;    // absolute frequencies
    std::vector<int> subcarrier_indices;        // indices into the original grid
    std::vector<Vec2> tx_positions;
    std::vector<Vec2> user_positions;
    double carrier_hz = 0.0;
    double bandwidth_hz = 0.0;
    std::uint64_t seed = 0;

    int n_subcarriers() const { return static_cast<int>(subcarriers.size()); }
    int n_tx() const { return subcarriers.empty() ? 0 : static_cast<int>(subcarriers[0].rows()); }
    int n_users() const { return subcarriers.empty() ? 0 : static_cast<int>(subcarriers[0].cols()); }

    // Rows of subcarrier sc gathered for a selected antenna subset.
    ComplexMatrix submatrix(int sc, std::span<const int> selection) const {
        const ComplexMatrix& h = subcarriers.at(static_cast<std::size_t>(sc));
        ComplexMatrix out(static_cast<Eigen::Index>(selection.size()), h.cols());
        for (std::size_t i = 0; i < selection.size(); ++i) {
            const int a = selection[i];
            if (a < 0 || a >= h.rows())
                throw std::invalid_argument("ChannelTensor::submatrix: antenna index out of range");
            out.row(static_cast<Eigen::Index>(i)) = h.row(a);
        }
        return out;
    }

    double mean_energy() const {
        double acc = 0.0;
        std::uint64_t count = 0;
        for (const ComplexMatrix& h : subcarriers) {
            acc += h.squaredNorm();
            count += static_cast<std::uint64_t>(h.size());
        }
        if (count == 0) throw std::domain_error("ChannelTensor: empty tensor");
        return acc / static_cast<double>(count);
    }
};

namespace detail {

inline std::vector<Vec2> place_uniform(int count, double ax, double ay, std::mt19937_64& rng,
                                       std::vector<Vec2>& occupied) {
    std::uniform_real_distribution<double> ux(0.0, ax), uy(0.0, ay);
    std::vector<Vec2> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        Vec2 p;
        for (int attempt = 0;; ++attempt) {
            p = {ux(rng), uy(rng)};
            bool clash = false;
            for (const Vec2& q : occupied)
                if (distance(p, q) < 1e-6) { clash = true; break; }
            if (!clash) break;
            if (attempt > 1000)
                throw std::logic_error("place_uniform: could not separate points");
        }
        out.push_back(p);
        occupied.push_back(p);
    }
    return out;
}

// Amplitude pathloss with free-space reference at 1 m; distances below the
// reference are clamped so the law stays bounded.
inline double pathloss_amplitude(double d_m, double carrier_hz, double exponent) {
    const double lambda = kSpeedOfLight / carrier_hz;
    const double ref = lambda / (4.0 * std::numbers::pi);
    return ref * std::pow(std::max(d_m, 1.0), -exponent / 2.0);
}

}  // namespace detail

// Subcarrier grid: evenly spaced, symmetric about the carrier, spacing B/n.
// A single subcarrier sits exactly on the carrier.
inline std::vector<double> subcarrier_frequencies(double carrier_hz, double bandwidth_hz, int n) {
    std::vector<double> f(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
        f[static_cast<std::size_t>(k)] =
            carrier_hz + (k - 0.5 * (n - 1)) * (bandwidth_hz / n);
    return f;
}

inline ChannelTensor generate_channel(const SceneConfig& cfg) {
    cfg.check();

    std::vector<Vec2> occupied;
    std::mt19937_64 rng_tx = make_rng(derive_seed(cfg.seed, 0));
    std::mt19937_64 rng_users = make_rng(derive_seed(cfg.seed, 1));
    std::mt19937_64 rng_scat = make_rng(derive_seed(cfg.seed, 2));
    std::mt19937_64 rng_obst = make_rng(derive_seed(cfg.seed, 3));
    std::mt19937_64 rng_gain = make_rng(derive_seed(cfg.seed, 4));
    std::mt19937_64 rng_shadow = make_rng(derive_seed(cfg.seed, 5));

    std::vector<Vec2> tx = cfg.tx_positions;
    if (tx.empty()) tx = detail::place_uniform(cfg.n_tx, cfg.area_x_m, cfg.area_y_m, rng_tx, occupied);
    else occupied.insert(occupied.end(), tx.begin(), tx.end());

    std::vector<Vec2> users = cfg.user_positions;
    if (users.empty())
        users = detail::place_uniform(cfg.n_users, cfg.area_x_m, cfg.area_y_m, rng_users, occupied);
    else occupied.insert(occupied.end(), users.begin(), users.end());

    const std::vector<Vec2> scat =
        detail::place_uniform(cfg.n_scatterers, cfg.area_x_m, cfg.area_y_m, rng_scat, occupied);

    std::vector<Obstacle> obstacles;
    {
        std::uniform_real_distribution<double> ux(0.0, cfg.area_x_m), uy(0.0, cfg.area_y_m);
        const double wx = cfg.obstacle_extent_frac * cfg.area_x_m;
        const double wy = cfg.obstacle_extent_frac * cfg.area_y_m;
        for (int i = 0; i < cfg.n_obstacles; ++i) {
            const double cx = ux(rng_obst);
            const double cy = uy(rng_obst);
            obstacles.push_back({cx - wx / 2, cy - wy / 2, cx + wx / 2, cy + wy / 2});
        }
    }

    // One complex gain per scatterer, shared by every link; this is what
    // correlates co-located antennas.
    std::vector<std::complex<double>> gains(static_cast<std::size_t>(cfg.n_scatterers));
    {
        std::normal_distribution<double> n01(0.0, std::numbers::sqrt2 / 2.0);
        for (auto& g : gains) g = {n01(rng_gain), n01(rng_gain)};
    }
    const double scatter_norm = cfg.n_scatterers > 0 ? 1.0 / std::sqrt(cfg.n_scatterers) : 0.0;

    Eigen::MatrixXd shadow_amp = Eigen::MatrixXd::Ones(cfg.n_tx, cfg.n_users);
    if (cfg.shadow_sigma_db > 0.0) {
        std::normal_distribution<double> ndb(0.0, cfg.shadow_sigma_db);
        for (int t = 0; t < cfg.n_tx; ++t)
            for (int u = 0; u < cfg.n_users; ++u)
                shadow_amp(t, u) = std::pow(10.0, ndb(rng_shadow) / 20.0);
    }

    ChannelTensor out;
    out.subcarrier_freqs_hz = subcarrier_frequencies(cfg.carrier_hz, cfg.bandwidth_hz, cfg.n_subcarriers);
    out.subcarrier_indices.resize(static_cast<std::size_t>(cfg.n_subcarriers));
    for (int k = 0; k < cfg.n_subcarriers; ++k) out.subcarrier_indices[static_cast<std::size_t>(k)] = k;
    out.tx_positions = tx;
    out.user_positions = users;
    out.carrier_hz = cfg.carrier_hz;
    out.bandwidth_hz = cfg.bandwidth_hz;
    out.seed = cfg.seed;
    out.subcarriers.assign(static_cast<std::size_t>(cfg.n_subcarriers),
                           ComplexMatrix::Zero(cfg.n_tx, cfg.n_users));

    for (int t = 0; t < cfg.n_tx; ++t) {
        for (int u = 0; u < cfg.n_users; ++u) {
            // Collect path (amplitude, delay) pairs for this link, then roll
            // the phase per subcarrier.
            struct Path {
                std::complex<double> amp;
                double delay_s;
            };
            std::vector<Path> paths;

            const double d_los = distance(tx[static_cast<std::size_t>(t)],
                                          users[static_cast<std::size_t>(u)]);
            bool blocked = false;
            for (const Obstacle& o : obstacles)
                if (o.blocks(tx[static_cast<std::size_t>(t)], users[static_cast<std::size_t>(u)])) {
                    blocked = true;
                    break;
                }
            if (!blocked)
                paths.push_back({detail::pathloss_amplitude(d_los, cfg.carrier_hz, cfg.pathloss_exponent),
                                 d_los / kSpeedOfLight});

            for (int s = 0; s < cfg.n_scatterers; ++s) {
                const double d_path = distance(tx[static_cast<std::size_t>(t)], scat[static_cast<std::size_t>(s)]) +
                                      distance(scat[static_cast<std::size_t>(s)], users[static_cast<std::size_t>(u)]);
                paths.push_back({gains[static_cast<std::size_t>(s)] * scatter_norm *
                                     detail::pathloss_amplitude(d_path, cfg.carrier_hz, cfg.pathloss_exponent),
                                 d_path / kSpeedOfLight});
            }

            const double shadow = shadow_amp(t, u);
            for (int k = 0; k < cfg.n_subcarriers; ++k) {
                const double f = out.subcarrier_freqs_hz[static_cast<std::size_t>(k)];
                std::complex<double> h{0.0, 0.0};
                for (const Path& p : paths) {
                    const double phi = -2.0 * std::numbers::pi * f * p.delay_s;
                    h += p.amp * std::complex<double>(std::cos(phi), std::sin(phi));
                }
                out.subcarriers[static_cast<std::size_t>(k)](t, u) = shadow * h;
            }
        }
    }
    return out;
}

// Scale every entry by one global constant so the mean squared magnitude
// over all subcarriers, antennas and users is exactly 1.
inline ChannelTensor normalize_channel(const ChannelTensor& h) {
    const double energy = h.mean_energy();
    if (!(energy > 0.0))
        throw std::domain_error("normalize_channel: all-zero tensor cannot be normalised");
    const double scale = 1.0 / std::sqrt(energy);
    ChannelTensor out = h;
    for (ComplexMatrix& m : out.subcarriers) m *= scale;
    return out;
}

// Gauss-Markov CSI error: sqrt(1-eps^2) H + eps E with E i.i.d. circularly
// symmetric complex Gaussian at the same per-entry average energy as H.
inline ChannelTensor perturb_csi(const ChannelTensor& h, double error_fraction, std::uint64_t seed) {
    if (!(error_fraction >= 0.0 && error_fraction <= 1.0))
        throw std::invalid_argument("perturb_csi: error_fraction must lie in [0, 1]");
    if (error_fraction == 0.0) return h;

    const double energy = h.mean_energy();
    std::mt19937_64 rng = make_rng(derive_seed(seed, 0xC51));
    std::normal_distribution<double> n01(0.0, std::sqrt(energy / 2.0));

    const double keep = std::sqrt(1.0 - error_fraction * error_fraction);
    ChannelTensor out = h;
    for (ComplexMatrix& m : out.subcarriers)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            for (Eigen::Index r = 0; r < m.rows(); ++r)
                m(r, c) = keep * m(r, c) +
                          error_fraction * std::complex<double>(n01(rng), n01(rng));
    return out;
}

// Restrict the tensor to a uniformly random subcarrier subset of size
// ceil(fraction * n), in ascending original order.
inline ChannelTensor subsample_subcarriers(const ChannelTensor& h, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw std::invalid_argument("subsample_subcarriers: fraction must lie in (0, 1]");
    const int n = h.n_subcarriers();
    const int count = std::min(n, static_cast<int>(std::ceil(fraction * n)));

    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 rng = make_rng(derive_seed(seed, 0x5C));
    for (int i = 0; i < count; ++i) {
        std::uniform_int_distribution<int> pick(i, n - 1);
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(rng))]);
    }
    idx.resize(static_cast<std::size_t>(count));
    std::sort(idx.begin(), idx.end());

    ChannelTensor out;
    out.tx_positions = h.tx_positions;
    out.user_positions = h.user_positions;
    out.carrier_hz = h.carrier_hz;
    out.bandwidth_hz = h.bandwidth_hz;
    out.seed = h.seed;
    for (int k : idx) {
        out.subcarriers.push_back(h.subcarriers[static_cast<std::size_t>(k)]);
        out.subcarrier_freqs_hz.push_back(h.subcarrier_freqs_hz[static_cast<std::size_t>(k)]);
        out.subcarrier_indices.push_back(h.subcarrier_indices[static_cast<std::size_t>(k)]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Serialisation.
//
// Binary layout (little endian):
//   magic "RPNSELCH", u32 version = 1,
//   u32 n_subcarriers, u32 n_tx, u32 n_users,
//   f64 carrier_hz, f64 bandwidth_hz, u64 seed,
//   n_tx * (f64 x, f64 y), n_users * (f64 x, f64 y),
//   n_subcarriers * f64 frequency, n_subcarriers * u32 original index,
//   then subcarrier-major coefficient blocks: for each subcarrier, rows are
//   tx antennas, columns users, each entry as interleaved f64 re, f64 im.
//
// CSV layout: `# rpnsel-channel v1` first, metadata comment lines, a header
// row `subcarrier,tx,user,re,im`, then one row per coefficient in the same
// subcarrier-major order. Position metadata is optional on import; missing
// positions are synthesised on a unit-spaced line.
// ---------------------------------------------------------------------------

namespace detail {

template <typename T>
void write_pod(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw std::runtime_error("channel load: truncated stream");
    return v;
}

}  // namespace detail

inline void save_channel_binary(const ChannelTensor& h, std::ostream& os) {
    os.write("RPNSELCH", 8);
    detail::write_pod<std::uint32_t>(os, 1);
    detail::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(h.n_subcarriers()));
    detail::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(h.n_tx()));
    detail::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(h.n_users()));
    detail::write_pod<double>(os, h.carrier_hz);
    detail::write_pod<double>(os, h.bandwidth_hz);
    detail::write_pod<std::uint64_t>(os, h.seed);
    for (const Vec2& p : h.tx_positions) { detail::write_pod(os, p.x); detail::write_pod(os, p.y); }
    for (const Vec2& p : h.user_positions) { detail::write_pod(os, p.x); detail::write_pod(os, p.y); }
    for (double f : h.subcarrier_freqs_hz) detail::write_pod(os, f);
    for (int i : h.subcarrier_indices) detail::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(i));
    for (const ComplexMatrix& m : h.subcarriers)
        for (Eigen::Index t = 0; t < m.rows(); ++t)
            for (Eigen::Index u = 0; u < m.cols(); ++u) {
                detail::write_pod(os, m(t, u).real());
                detail::write_pod(os, m(t, u).imag());
            }
}

inline ChannelTensor load_channel_binary(std::istream& is) {
    char magic[8];
    is.read(magic, 8);
    if (!is || std::string(magic, 8) != "RPNSELCH")
        throw std::runtime_error("channel load: bad magic, not a channel file");
    const auto version = detail::read_pod<std::uint32_t>(is);
    if (version != 1) throw std::runtime_error("channel load: unsupported version");
    const auto n_sub = detail::read_pod<std::uint32_t>(is);
    const auto n_tx = detail::read_pod<std::uint32_t>(is);
    const auto n_users = detail::read_pod<std::uint32_t>(is);
    if (n_sub == 0 || n_tx == 0 || n_users == 0)
        throw std::runtime_error("channel load: degenerate dimensions");

    ChannelTensor h;
    h.carrier_hz = detail::read_pod<double>(is);
    h.bandwidth_hz = detail::read_pod<double>(is);
    h.seed = detail::read_pod<std::uint64_t>(is);
    h.tx_positions.resize(n_tx);
    for (auto& p : h.tx_positions) { p.x = detail::read_pod<double>(is); p.y = detail::read_pod<double>(is); }
    h.user_positions.resize(n_users);
    for (auto& p : h.user_positions) { p.x = detail::read_pod<double>(is); p.y = detail::read_pod<double>(is); }
    h.subcarrier_freqs_hz.resize(n_sub);
    for (auto& f : h.subcarrier_freqs_hz) f = detail::read_pod<double>(is);
    h.subcarrier_indices.resize(n_sub);
    for (auto& i : h.subcarrier_indices) i = static_cast<int>(detail::read_pod<std::uint32_t>(is));
    h.subcarriers.assign(n_sub, ComplexMatrix(n_tx, n_users));
    for (auto& m : h.subcarriers)
        for (Eigen::Index t = 0; t < m.rows(); ++t)
            for (Eigen::Index u = 0; u < m.cols(); ++u) {
                const double re = detail::read_pod<double>(is);
                const double im = detail::read_pod<double>(is);
                if (!std::isfinite(re) || !std::isfinite(im))
                    throw std::runtime_error("channel load: non-finite coefficient");
                m(t, u) = {re, im};
            }
    return h;
}

inline void save_channel_csv(const ChannelTensor& h, std::ostream& os) {
    os << "# rpnsel-channel v1\n";
    os << "# dims " << h.n_subcarriers() << ' ' << h.n_tx() << ' ' << h.n_users() << '\n';
    char buf[64];
    auto fmt = [&buf](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    os << "# carrier_hz " << fmt(h.carrier_hz) << '\n';
    os << "# bandwidth_hz " << fmt(h.bandwidth_hz) << '\n';
    os << "# seed " << h.seed << '\n';
    os << "# tx_positions";
    for (const Vec2& p : h.tx_positions) os << ' ' << fmt(p.x) << ';' << fmt(p.y);
    os << '\n';
    os << "# user_positions";
    for (const Vec2& p : h.user_positions) os << ' ' << fmt(p.x) << ';' << fmt(p.y);
    os << '\n';
    os << "# subcarrier_freqs_hz";
    for (double f : h.subcarrier_freqs_hz) os << ' ' << fmt(f);
    os << '\n';
    os << "# subcarrier_indices";
    for (int i : h.subcarrier_indices) os << ' ' << i;
    os << '\n';
    os << "subcarrier,tx,user,re,im\n";
    for (int k = 0; k < h.n_subcarriers(); ++k)
        for (int t = 0; t < h.n_tx(); ++t)
            for (int u = 0; u < h.n_users(); ++u) {
                const std::complex<double> v = h.subcarriers[static_cast<std::size_t>(k)](t, u);
                os << k << ',' << t << ',' << u << ',' << fmt(v.real()) << ',' << fmt(v.imag()) << '\n';
            }
}

inline ChannelTensor load_channel_csv(std::istream& is) {
    ChannelTensor h;
    int n_sub = -1, n_tx = -1, n_users = -1;
    std::string line;
    bool saw_header = false;

    auto parse_positions = [](std::istringstream& ss) {
        std::vector<Vec2> out;
        std::string tok;
        while (ss >> tok) {
            const auto semi = tok.find(';');
            if (semi == std::string::npos) throw std::runtime_error("channel csv: malformed position");
            out.push_back({std::stod(tok.substr(0, semi)), std::stod(tok.substr(semi + 1))});
        }
        return out;
    };

    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ss(line.substr(1));
            std::string key;
            ss >> key;
            if (key == "dims") {
                ss >> n_sub >> n_tx >> n_users;
            } else if (key == "carrier_hz") {
                ss >> h.carrier_hz;
            } else if (key == "bandwidth_hz") {
                ss >> h.bandwidth_hz;
            } else if (key == "seed") {
                ss >> h.seed;
            } else if (key == "tx_positions") {
                h.tx_positions = parse_positions(ss);
            } else if (key == "user_positions") {
                h.user_positions = parse_positions(ss);
            } else if (key == "subcarrier_freqs_hz") {
                double f;
                while (ss >> f) h.subcarrier_freqs_hz.push_back(f);
            } else if (key == "subcarrier_indices") {
                int i;
                while (ss >> i) h.subcarrier_indices.push_back(i);
            }
            continue;
        }
        if (!saw_header) {
            if (line.rfind("subcarrier,", 0) != 0)
                throw std::runtime_error("channel csv: missing header row");
            if (n_sub < 1 || n_tx < 1 || n_users < 1)
                throw std::runtime_error("channel csv: missing or invalid dims line");
            h.subcarriers.assign(static_cast<std::size_t>(n_sub), ComplexMatrix::Zero(n_tx, n_users));
            saw_header = true;
            continue;
        }
        std::istringstream ss(line);
        int k, t, u;
        double re, im;
        char comma;
        if (!(ss >> k >> comma >> t >> comma >> u >> comma >> re >> comma >> im))
            throw std::runtime_error("channel csv: malformed data row: " + line);
        if (k < 0 || k >= n_sub || t < 0 || t >= n_tx || u < 0 || u >= n_users)
            throw std::runtime_error("channel csv: index out of range in row: " + line);
        h.subcarriers[static_cast<std::size_t>(k)](t, u) = {re, im};
    }
    if (!saw_header) throw std::runtime_error("channel csv: no data found");

    if (h.subcarrier_freqs_hz.empty()) h.subcarrier_freqs_hz.assign(static_cast<std::size_t>(n_sub), h.carrier_hz);
    if (h.subcarrier_indices.empty()) {
        h.subcarrier_indices.resize(static_cast<std::size_t>(n_sub));
        std::iota(h.subcarrier_indices.begin(), h.subcarrier_indices.end(), 0);
    }
    // Imported data may lack geometry; synthesise distinct positions so
    // distance-based neighbour maps stay well defined.
    if (h.tx_positions.empty())
        for (int t = 0; t < n_tx; ++t) h.tx_positions.push_back({static_cast<double>(t), 0.0});
    if (h.user_positions.empty())
        for (int u = 0; u < n_users; ++u) h.user_positions.push_back({static_cast<double>(u), 1.0});
    return h;
}

inline void save_channel(const ChannelTensor& h, const std::string& path) {
    const bool csv = path.size() >= 4 && path.substr(path.size() - 4) == ".csv";
    std::ofstream os(path, csv ? std::ios::out : std::ios::out | std::ios::binary);
    if (!os) throw std::runtime_error("save_channel: cannot open " + path);
    if (csv) save_channel_csv(h, os);
    else save_channel_binary(h, os);
}

inline ChannelTensor load_channel(const std::string& path) {
    std::ifstream is(path, std::ios::in | std::ios::binary);
    if (!is) throw std::runtime_error("load_channel: cannot open " + path);
    char magic[8] = {};
    is.read(magic, 8);
    const bool binary = is.gcount() == 8 && std::string(magic, 8) == "RPNSELCH";
    is.clear();
    is.seekg(0);
    if (binary) return load_channel_binary(is);
    return load_channel_csv(is);
}

}  // namespace rpnsel
