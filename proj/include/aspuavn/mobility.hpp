#pragma once

// Smooth-Turn mobility: each UAV alternates straight segments and circular
// arcs in the horizontal plane at a constant speed. Mode durations are
// exponential, turn radii uniform. Nodes reflect off the topology walls.

#include "domain.hpp"
#include "rng.hpp"

#include <numbers>
#include <utility>
#include <variant>

namespace aspuavn
{

struct MobilityParams
{
    double speed = 180.0;          // m/s
    double mean_straight = 3.0;    // s
    double mean_turn = 3.0;        // s
    double radius_min = 100.0;     // m
    double radius_max = 500.0;     // m
    double turn_probability = 0.5; // chance a new mode is a turn
};

struct StraightMode
{
    double remaining = 0.0;
};

struct TurningMode
{
    Position3 center;
    double radius = 0.0;
    double angular_rate = 0.0; // rad/s, sign gives direction
    double remaining = 0.0;
};

struct StState
{
    Vec3 heading{1.0, 0.0, 0.0};
    std::variant<StraightMode, TurningMode> mode = StraightMode{};
    double speed = 0.0;
};

namespace mobility_detail
{

inline Vec3 rotate_z(Vec3 v, double angle) noexcept
{
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return {c * v.x - s * v.y, s * v.x + c * v.y, v.z};
}

inline double remaining(const StState& st) noexcept
{
    return std::visit([](const auto& m) { return m.remaining; }, st.mode);
}

inline void consume(StState& st, double dt) noexcept
{
    std::visit([dt](auto& m) { m.remaining -= dt; }, st.mode);
}

} // namespace mobility_detail

/// Samples a fresh straight-or-turn mode for a node at `pos`.
inline void sample_mode(StState& st, Position3 pos, Rng& rng, const MobilityParams& params)
{
    if (rng.bernoulli(params.turn_probability))
    {
        TurningMode t;
        t.radius = rng.uniform(params.radius_min, params.radius_max);
        const double dir = rng.bernoulli(0.5) ? 1.0 : -1.0;
        const Vec3 left{-st.heading.y, st.heading.x, 0.0};
        t.center = pos + left * (dir * t.radius);
        t.angular_rate = dir * st.speed / t.radius;
        t.remaining = rng.exponential(params.mean_turn);
        st.mode = t;
    }
    else
    {
        st.mode = StraightMode{rng.exponential(params.mean_straight)};
    }
}

inline StState initial_st_state(Position3 pos, Rng& rng, const MobilityParams& params)
{
    StState st;
    st.speed = params.speed;
    const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
    st.heading = {std::cos(theta), std::sin(theta), 0.0};
    sample_mode(st, pos, rng, params);
    return st;
}

/// Reflects a position (and heading) back into the box. A reflected turn
/// continues as a straight segment for the rest of its duration.
inline void reflect_into(Position3& pos, StState& st, const Box& box) noexcept
{
    bool bounced = false;
    auto axis = [&](double& p, double& h, double lo, double hi) {
        for (int guard = 0; guard < 4 && (p < lo || p > hi); ++guard)
        {
            if (p < lo)
                p = 2.0 * lo - p;
            else
                p = 2.0 * hi - p;
            h = -h;
            bounced = true;
        }
        p = std::clamp(p, lo, hi);
    };
    axis(pos.x, st.heading.x, box.min.x, box.max.x);
    axis(pos.y, st.heading.y, box.min.y, box.max.y);
    axis(pos.z, st.heading.z, box.min.z, box.max.z);
    if (bounced)
    {
        if (auto* t = std::get_if<TurningMode>(&st.mode))
            st.mode = StraightMode{t->remaining};
    }
}

/// Advances one node by dt seconds. Passing `bounds` enables wall reflection.
inline std::pair<Position3, StState> st_step(Position3 pos, StState st, double dt, Rng& rng,
                                             const MobilityParams& params,
                                             const Box* bounds = nullptr)
{
    if (!(dt > 0.0))
        throw ContractViolation("st_step: dt must be positive");
    double left = dt;
    while (left > 0.0)
    {
        double rem = mobility_detail::remaining(st);
        if (rem <= 0.0)
        {
            sample_mode(st, pos, rng, params);
            continue;
        }
        const double slice = std::min(left, rem);
        if (auto* t = std::get_if<TurningMode>(&st.mode))
        {
            const double angle = t->angular_rate * slice;
            pos = t->center + mobility_detail::rotate_z(pos - t->center, angle);
            st.heading = mobility_detail::rotate_z(st.heading, angle).normalized();
        }
        else
        {
            pos = pos + st.heading * (st.speed * slice);
        }
        mobility_detail::consume(st, slice);
        if (bounds)
            reflect_into(pos, st, *bounds);
        left -= slice;
    }
    return {pos, st};
}

} // namespace aspuavn
