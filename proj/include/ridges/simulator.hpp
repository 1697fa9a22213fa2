#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <numbers>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ridges/direction_field.hpp"
#include "ridges/errors.hpp"
#include "ridges/force_model.hpp"
#include "ridges/geometry.hpp"
#include "ridges/parallel.hpp"

namespace ridges {

/// Positions of N particles on the torus plus the simulation clock.
/// Stored as coordinate arrays so force passes stream through them.
struct ParticleState {
    std::vector<double> x;
    std::vector<double> y;
    double time = 0.0;

    int size() const { return static_cast<int>(x.size()); }
    TorusPoint point(int j) const { return {x[j], y[j]}; }
};

enum class Integrator { euler, rkdp };
enum class NeighborMode { direct, cell_list };

struct UniformInit {
    std::uint64_t seed = 12345;
};
struct CircleInit {
    TorusPoint center{0.5, 0.5};
    double radius = 0.005;
};
struct LinesInit {
    int n_lines = 1;
};
using InitCondition = std::variant<UniformInit, CircleInit, LinesInit>;

struct SimConfig {
    int n_particles = 600;
    double dt = 0.2;
    double t_end = 1.0;
    Integrator integrator = Integrator::euler;
    NeighborMode neighbor = NeighborMode::cell_list;
    ForceModel force;
    DirectionField field = DirectionField::homogeneous(std::numbers::pi / 2);
    InitCondition init = UniformInit{};
    double snapshot_interval = 0.0;  // 0 means snapshot only at t=0 and t_end
    double stop_epsilon = 0.0;       // >0 enables early stop on tau/N
    int stop_window = 100;
};

struct RunReport {
    std::vector<std::pair<double, ParticleState>> snapshots;
    std::vector<std::pair<double, double>> tau_series;
    double wall_time_seconds = 0.0;
    SimConfig config_echo;
    bool complete = true;
    std::string error;
};

namespace detail {

struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

} // namespace detail

inline void validate(const SimConfig& cfg) {
    if (cfg.n_particles < 2) throw ConfigError("n_particles must be at least 2");
    if (!(cfg.dt > 0.0)) throw ConfigError("dt must be positive");
    if (!(cfg.t_end >= cfg.dt)) throw ConfigError("t_end must be at least dt");
    if (cfg.snapshot_interval != 0.0 && cfg.snapshot_interval < cfg.dt)
        throw ConfigError("snapshot_interval must be at least dt");
    if (cfg.stop_window < 1) throw ConfigError("stop_window must be at least 1");
    if (const auto* lines = std::get_if<LinesInit>(&cfg.init)) {
        if (lines->n_lines < 1) throw ConfigError("init.n_lines must be at least 1");
        if (cfg.n_particles % lines->n_lines != 0)
            throw ConfigError("init: n_particles must be divisible by n_lines");
    }
    validate(cfg.force);
}

/// Build the initial state: seeded uniform draws (two per particle),
/// equiangular points on a circle, or n_lines equidistant vertical lines at
/// x = m/n with N/n equally spaced particles per line (the steady-state
/// construction).
inline ParticleState init_state(const SimConfig& cfg) {
    validate(cfg);
    const int n = cfg.n_particles;
    ParticleState st;
    st.x.resize(n);
    st.y.resize(n);
    st.time = 0.0;
    if (const auto* u = std::get_if<UniformInit>(&cfg.init)) {
        detail::SplitMix64 rng(u->seed);
        for (int j = 0; j < n; ++j) {
            st.x[j] = rng.next_double();
            st.y[j] = rng.next_double();
        }
    } else if (const auto* c = std::get_if<CircleInit>(&cfg.init)) {
        for (int j = 0; j < n; ++j) {
            double ang = 2.0 * std::numbers::pi * j / n;
            TorusPoint p = wrap({c->center.x + c->radius * std::cos(ang),
                                 c->center.y + c->radius * std::sin(ang)});
            st.x[j] = p.x;
            st.y[j] = p.y;
        }
    } else {
        const auto& l = std::get<LinesInit>(cfg.init);
        int per_line = n / l.n_lines;
        for (int j = 0; j < n; ++j) {
            st.x[j] = static_cast<double>(j / per_line) / l.n_lines;
            st.y[j] = static_cast<double>(j % per_line) / per_line;
        }
    }
    return st;
}

/// L1 change of positions between two states using minimum-image component
/// displacements, so a hop across the periodic boundary counts as the small
/// move it is.
inline double tau(const ParticleState& prev, const ParticleState& curr) {
    if (prev.size() != curr.size()) throw InputError("tau: particle counts differ");
    double sum = 0.0;
    for (int j = 0; j < curr.size(); ++j) {
        sum += std::abs(detail::min_image(curr.x[j] - prev.x[j]));
        sum += std::abs(detail::min_image(curr.y[j] - prev.y[j]));
    }
    return sum;
}

namespace detail {

/// Reusable buffers for force passes.
struct ForceWorkspace {
    std::vector<Vec2> forces;
    // cell-list structures
    std::vector<int> cell_start;   // size cells+1, prefix offsets into items
    std::vector<int> cell_fill;
    std::vector<int> items;        // particle ids grouped by cell, ascending within
    std::vector<int> cand_begin;   // per cell, offset into packed candidate arrays
    std::vector<int> cand_count;
    std::vector<double> cand_x, cand_y;
    std::vector<int> cand_idx;
    std::vector<int> cell_of;
};

inline thread_local std::vector<double> tl_scratch_s, tl_scratch_l;

/// Net force pass. Every particle's two channel sums accumulate over its
/// candidate list in ascending particle index; candidates beyond the cutoff
/// contribute exact zeros, which keeps direct and cell-list passes
/// bit-identical. The per-particle loop runs in parallel; each index writes
/// only its own slot.
template <class LawEval>
inline void net_forces_pass(const ParticleState& st, const ForceModel& model,
                            const DirectionField& field, const LawEval& law, bool use_cells,
                            ForceWorkspace& ws) {
    const int n = st.size();
    ws.forces.assign(n, Vec2{});
    const double cutoff = model.cutoff;
    const double eta = model.eta;
    const double* xs = st.x.data();
    const double* ys = st.y.data();

    int m = use_cells ? static_cast<int>(std::floor(1.0 / cutoff)) : 0;
    if (m < 3) m = 0;  // grid too coarse for a 3x3 neighborhood: direct

    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto guard = [&](auto&& body) {
        try {
            body();
        } catch (...) {
            std::lock_guard lk(error_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    };

    if (m == 0) {
        ThreadPool::global().parallel_for(n, 16, [&](int b, int e) {
            guard([&] {
                tl_scratch_s.resize(n);
                tl_scratch_l.resize(n);
                for (int j = b; j < e; ++j) {
                    Frame frame;
                    try {
                        frame = field.frame_at(st.point(j));
                    } catch (const SingularityError& ex) {
                        throw SingularityError(std::string(ex.what()) + " (particle " +
                                               std::to_string(j) + ")");
                    }
                    Vec2 a = channel_sums(xs[j], ys[j], frame, eta, cutoff, xs, ys, n, law,
                                          tl_scratch_s.data(), tl_scratch_l.data());
                    double nn = static_cast<double>(n);
                    ws.forces[j] = {(a.x * frame.s.x + a.y * frame.l.x) / nn,
                                    (a.x * frame.s.y + a.y * frame.l.y) / nn};
                }
            });
        });
        if (first_error) std::rethrow_exception(first_error);
        return;
    }

    // bucket particles; items stay ascending per cell because j runs ascending
    const int cells = m * m;
    ws.cell_of.resize(n);
    ws.cell_start.assign(cells + 1, 0);
    for (int j = 0; j < n; ++j) {
        if (!(xs[j] >= 0.0 && xs[j] < 1.0 && ys[j] >= 0.0 && ys[j] < 1.0))
            throw DivergenceError(st.time, j);  // also rejects NaN before bucketing
        int cx = static_cast<int>(xs[j] * m);
        int cy = static_cast<int>(ys[j] * m);
        if (cx >= m) cx = m - 1;
        if (cy >= m) cy = m - 1;
        int c = cy * m + cx;
        ws.cell_of[j] = c;
        ++ws.cell_start[c + 1];
    }
    for (int c = 0; c < cells; ++c) ws.cell_start[c + 1] += ws.cell_start[c];
    ws.items.resize(n);
    ws.cell_fill.assign(ws.cell_start.begin(), ws.cell_start.end() - 1);
    for (int j = 0; j < n; ++j) ws.items[ws.cell_fill[ws.cell_of[j]]++] = j;

    // merged candidate list per cell (3x3 neighborhood, sorted ascending),
    // packed into contiguous coordinate arrays shared by the cell's particles
    ws.cand_begin.resize(cells);
    ws.cand_count.resize(cells);
    ws.cand_idx.clear();
    ws.cand_x.clear();
    ws.cand_y.clear();
    for (int cy = 0; cy < m; ++cy) {
        for (int cx = 0; cx < m; ++cx) {
            int c = cy * m + cx;
            ws.cand_begin[c] = static_cast<int>(ws.cand_idx.size());
            for (int oy = -1; oy <= 1; ++oy) {
                int ny = cy + oy;
                ny = ny < 0 ? ny + m : (ny >= m ? ny - m : ny);
                for (int ox = -1; ox <= 1; ++ox) {
                    int nx = cx + ox;
                    nx = nx < 0 ? nx + m : (nx >= m ? nx - m : nx);
                    int nc = ny * m + nx;
                    for (int it = ws.cell_start[nc]; it < ws.cell_start[nc + 1]; ++it)
                        ws.cand_idx.push_back(ws.items[it]);
                }
            }
            auto begin = ws.cand_idx.begin() + ws.cand_begin[c];
            std::sort(begin, ws.cand_idx.end());
            ws.cand_count[c] = static_cast<int>(ws.cand_idx.size()) - ws.cand_begin[c];
        }
    }
    ws.cand_x.resize(ws.cand_idx.size());
    ws.cand_y.resize(ws.cand_idx.size());
    for (std::size_t i = 0; i < ws.cand_idx.size(); ++i) {
        ws.cand_x[i] = xs[ws.cand_idx[i]];
        ws.cand_y[i] = ys[ws.cand_idx[i]];
    }

    int max_cand = 0;
    for (int c = 0; c < cells; ++c) max_cand = std::max(max_cand, ws.cand_count[c]);

    ThreadPool::global().parallel_for(n, 16, [&](int b, int e) {
        guard([&] {
            tl_scratch_s.resize(max_cand);
            tl_scratch_l.resize(max_cand);
            for (int j = b; j < e; ++j) {
                Frame frame;
                try {
                    frame = field.frame_at(st.point(j));
                } catch (const SingularityError& ex) {
                    throw SingularityError(std::string(ex.what()) + " (particle " +
                                           std::to_string(j) + ")");
                }
                int c = ws.cell_of[j];
                Vec2 a = channel_sums(xs[j], ys[j], frame, eta, cutoff,
                                      ws.cand_x.data() + ws.cand_begin[c],
                                      ws.cand_y.data() + ws.cand_begin[c], ws.cand_count[c],
                                      law, tl_scratch_s.data(), tl_scratch_l.data());
                double nn = static_cast<double>(n);
                ws.forces[j] = {(a.x * frame.s.x + a.y * frame.l.x) / nn,
                                (a.x * frame.s.y + a.y * frame.l.y) / nn};
            }
        });
    });
    if (first_error) std::rethrow_exception(first_error);
}

inline void net_forces_into(const ParticleState& st, const ForceModel& model,
                            const DirectionField& field, NeighborMode mode, ForceWorkspace& ws) {
    with_law_evaluator(model, [&](const auto& law) {
        net_forces_pass(st, model, field, law, mode == NeighborMode::cell_list, ws);
    });
}

} // namespace detail

/// Net velocity of every particle, (1/N) sum of pair forces, by direct
/// summation over all pairs.
inline std::vector<Vec2> net_forces_direct(const ParticleState& st, const ForceModel& model,
                                           const DirectionField& field) {
    detail::ForceWorkspace ws;
    detail::net_forces_into(st, model, field, NeighborMode::direct, ws);
    return std::move(ws.forces);
}

/// Same result bit-for-bit via cell-list neighbor search; falls back to the
/// direct pass when floor(1/cutoff) < 3.
inline std::vector<Vec2> net_forces_cell_list(const ParticleState& st, const ForceModel& model,
                                              const DirectionField& field) {
    detail::ForceWorkspace ws;
    detail::net_forces_into(st, model, field, NeighborMode::cell_list, ws);
    return std::move(ws.forces);
}

namespace detail {

// Dormand-Prince 5(4) tableau; fixed step, fifth-order update, FSAL.
inline constexpr double kA21 = 1.0 / 5.0;
inline constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
inline constexpr double kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0, kA43 = 32.0 / 9.0;
inline constexpr double kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0,
                        kA53 = 64448.0 / 6561.0, kA54 = -212.0 / 729.0;
inline constexpr double kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0, kA63 = 46732.0 / 5247.0,
                        kA64 = 49.0 / 176.0, kA65 = -5103.0 / 18656.0;
inline constexpr double kB1 = 35.0 / 384.0, kB3 = 500.0 / 1113.0, kB4 = 125.0 / 192.0,
                        kB5 = -2187.0 / 6784.0, kB6 = 11.0 / 84.0;

struct Stepper {
    ForceWorkspace ws;
    std::vector<Vec2> k1, k2, k3, k4, k5, k6, k7;
    ParticleState stage;
    bool have_fsal = false;

    void check_finite(const ParticleState& st) {
        for (int j = 0; j < st.size(); ++j)
            if (!std::isfinite(st.x[j]) || !std::isfinite(st.y[j]))
                throw DivergenceError(st.time, j);
    }

    void eval(const ParticleState& st, const SimConfig& cfg, std::vector<Vec2>& out) {
        net_forces_into(st, cfg.force, cfg.field, cfg.neighbor, ws);
        out.swap(ws.forces);
    }

    /// One step of the configured integrator; positions wrap after every
    /// update so cell bucketing stays valid.
    void advance(ParticleState& st, const SimConfig& cfg) {
        const int n = st.size();
        const double dt = cfg.dt;
        if (cfg.integrator == Integrator::euler) {
            eval(st, cfg, k1);
            for (int j = 0; j < n; ++j) {
                st.x[j] = wrap_unit(st.x[j] + dt * k1[j].x);
                st.y[j] = wrap_unit(st.y[j] + dt * k1[j].y);
            }
        } else {
            stage.x.resize(n);
            stage.y.resize(n);
            if (!have_fsal) {
                eval(st, cfg, k1);
            } else {
                k1.swap(k7);  // FSAL: last stage of the previous step
            }
            auto at = [&](std::vector<Vec2>& out, auto&&... terms) {
                stage.time = st.time;
                for (int j = 0; j < n; ++j) {
                    double ax = (... + (terms.first * terms.second[j].x));
                    double ay = (... + (terms.first * terms.second[j].y));
                    stage.x[j] = wrap_unit(st.x[j] + dt * ax);
                    stage.y[j] = wrap_unit(st.y[j] + dt * ay);
                }
                eval(stage, cfg, out);
            };
            using T = std::pair<double, std::vector<Vec2>&>;
            at(k2, T{kA21, k1});
            at(k3, T{kA31, k1}, T{kA32, k2});
            at(k4, T{kA41, k1}, T{kA42, k2}, T{kA43, k3});
            at(k5, T{kA51, k1}, T{kA52, k2}, T{kA53, k3}, T{kA54, k4});
            at(k6, T{kA61, k1}, T{kA62, k2}, T{kA63, k3}, T{kA64, k4}, T{kA65, k5});
            for (int j = 0; j < n; ++j) {
                double bx = kB1 * k1[j].x + kB3 * k3[j].x + kB4 * k4[j].x + kB5 * k5[j].x +
                            kB6 * k6[j].x;
                double by = kB1 * k1[j].y + kB3 * k3[j].y + kB4 * k4[j].y + kB5 * k5[j].y +
                            kB6 * k6[j].y;
                st.x[j] = wrap_unit(st.x[j] + dt * bx);
                st.y[j] = wrap_unit(st.y[j] + dt * by);
            }
            eval(st, cfg, k7);  // stage 7 doubles as next step's k1
            have_fsal = true;
        }
        st.time += dt;
        check_finite(st);
    }
};

} // namespace detail

/// Advance one time step (explicit Euler or fixed-step Dormand-Prince).
inline ParticleState step(const ParticleState& st, const SimConfig& cfg) {
    detail::Stepper stepper;
    ParticleState next = st;
    stepper.advance(next, cfg);
    return next;
}

/// Integrate to t_end, recording snapshots every snapshot_interval and the
/// position change tau after every step. Early stop (when enabled) fires
/// after stop_window consecutive steps with tau/N below stop_epsilon. A
/// divergence aborts the run and returns the partial report with
/// complete=false.
inline RunReport run(const SimConfig& cfg) {
    validate(cfg);
    auto t_start = std::chrono::steady_clock::now();
    RunReport report;
    report.config_echo = cfg;

    ParticleState st = init_state(cfg);
    const long long n_steps = std::llround(cfg.t_end / cfg.dt);
    const long long snap_every =
        cfg.snapshot_interval == 0.0
            ? n_steps
            : std::max(1ll, std::llround(cfg.snapshot_interval / cfg.dt));
    report.snapshots.emplace_back(st.time, st);

    detail::Stepper stepper;
    std::vector<double> prev_x, prev_y;
    int quiet_steps = 0;
    try {
        for (long long i = 1; i <= n_steps; ++i) {
            prev_x = st.x;
            prev_y = st.y;
            stepper.advance(st, cfg);
            double tv = 0.0;
            for (int j = 0; j < st.size(); ++j) {
                tv += std::abs(detail::min_image(st.x[j] - prev_x[j]));
                tv += std::abs(detail::min_image(st.y[j] - prev_y[j]));
            }
            report.tau_series.emplace_back(st.time, tv);
            bool last = i == n_steps;
            if (i % snap_every == 0 || last)
                if (report.snapshots.back().first < st.time)
                    report.snapshots.emplace_back(st.time, st);
            if (cfg.stop_epsilon > 0.0) {
                quiet_steps = (tv / st.size() < cfg.stop_epsilon) ? quiet_steps + 1 : 0;
                if (quiet_steps >= cfg.stop_window) {
                    if (report.snapshots.back().first < st.time)
                        report.snapshots.emplace_back(st.time, st);
                    break;
                }
            }
        }
    } catch (const DivergenceError& ex) {
        report.complete = false;
        report.error = ex.what();
    }
    report.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return report;
}

} // namespace ridges
