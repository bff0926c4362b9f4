#include "fedgen/rollout.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fedgen {

namespace {
constexpr double kPi = 3.141592653589793238462643383279;
}

double wrap_angle(double a) {
    a = std::fmod(a + kPi, 2.0 * kPi);
    if (a <= 0.0) a += 2.0 * kPi;
    return a - kPi;
}

RobotState integrate_step(const RobotState& s, double u, double d, double dt, const CarParams& car) {
    u = std::clamp(u, -car.u_max, car.u_max);
    RobotState n;
    n.x1 = s.x1 + dt * (car.speed * std::cos(s.x3) + d);
    n.x2 = s.x2 + dt * car.speed * std::sin(s.x3);
    n.x3 = wrap_angle(s.x3 + dt * std::tan(u) / car.wheelbase);
    return n;
}

std::vector<double> sense(const EnvironmentSpec& env, const RobotState& s, const SensorParams& sensor) {
    if (sensor.beams <= 0) throw std::invalid_argument("sense: beam count must be positive");
    if (!(sensor.range > 0.0)) throw std::invalid_argument("sense: range must be positive");

    const double step = sensor.fan == SensorFan::asymmetric ? kPi / 60.0 : kPi / 30.0;
    std::vector<double> out(static_cast<std::size_t>(sensor.beams));

    for (int b = 0; b < sensor.beams; ++b) {
        const double a = s.x3 - kPi / 3.0 + b * step;
        const double dx = std::cos(a);
        const double dy = std::sin(a);
        double best = sensor.range;

        for (const auto& o : env.obstacles) {
            const double ox = s.x1 - o.cx;
            const double oy = s.x2 - o.cy;
            const double bq = dx * ox + dy * oy;
            const double cq = ox * ox + oy * oy - o.r * o.r;
            const double disc = bq * bq - cq;
            if (disc < 0.0) continue;
            const double root = std::sqrt(disc);
            double t = -bq - root;
            if (t < 0.0) t = -bq + root;  // beam starts inside: distance to exit
            if (t >= 0.0 && t < best) best = t;
        }

        // Walls: two verticals over x2 in [0,10], one horizontal over x1 in
        // [-5,5]. The top edge is open.
        if (dx < 0.0) {
            const double t = (arena::x1_min - s.x1) / dx;
            if (t >= 0.0 && t < best) {
                const double hit = s.x2 + t * dy;
                if (hit >= arena::x2_min && hit <= arena::x2_max) best = t;
            }
        }
        if (dx > 0.0) {
            const double t = (arena::x1_max - s.x1) / dx;
            if (t >= 0.0 && t < best) {
                const double hit = s.x2 + t * dy;
                if (hit >= arena::x2_min && hit <= arena::x2_max) best = t;
            }
        }
        if (dy < 0.0) {
            const double t = (arena::x2_min - s.x2) / dy;
            if (t >= 0.0 && t < best) {
                const double hit = s.x1 + t * dx;
                if (hit >= arena::x1_min && hit <= arena::x1_max) best = t;
            }
        }

        out[static_cast<std::size_t>(b)] = best;
    }
    return out;
}

std::vector<double> build_observation(const RobotState& s, std::span<const double> ranges) {
    std::vector<double> obs;
    obs.reserve(4 + ranges.size());
    obs.push_back(s.x1);
    obs.push_back(s.x2);
    obs.push_back(std::sin(s.x3));
    obs.push_back(std::cos(s.x3));
    obs.insert(obs.end(), ranges.begin(), ranges.end());
    return obs;
}

double kruzkov_cost(double t, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("kruzkov_cost: alpha must be positive");
    if (std::isnan(t) || t < 0.0) throw std::invalid_argument("kruzkov_cost: time must be >= 0");
    if (std::isinf(t)) return 1.0;
    return 1.0 - std::exp(-alpha * t);
}

double distance_to_goal(double x1, double x2) {
    const double nx = std::clamp(x1, arena::x1_min, arena::x1_max);
    const double d1 = x1 - nx;
    const double d2 = x2 - arena::x2_max;
    return std::sqrt(d1 * d1 + d2 * d2);
}

bool in_collision(const EnvironmentSpec& env, double x1, double x2, double footprint) {
    if (x1 <= arena::x1_min + footprint || x1 >= arena::x1_max - footprint ||
        x2 <= arena::x2_min + footprint)
        return true;
    for (const auto& o : env.obstacles) {
        const double dx = x1 - o.cx;
        const double dy = x2 - o.cy;
        const double rr = o.r + footprint;
        if (dx * dx + dy * dy <= rr * rr) return true;
    }
    return false;
}

bool at_goal(double x1, double x2) {
    return x2 >= arena::x2_max && x1 >= arena::x1_min && x1 <= arena::x1_max;
}

RolloutResult run_rollout(const EnvironmentSpec& env, const DisturbanceField& field,
                          const RobotState& start, const SteeringPolicy& policy,
                          const RolloutParams& params, std::vector<RobotState>* trajectory) {
    if (!(params.dt > 0.0)) throw std::invalid_argument("rollout: dt must be positive");
    if (!(params.t_max >= params.dt)) throw std::invalid_argument("rollout: t_max must cover one step");

    RolloutResult res;
    RobotState s = start;
    if (trajectory) trajectory->push_back(s);

    // Degenerate starts: already through the goal edge, or spawned in contact.
    if (at_goal(s.x1, s.x2)) {
        res.outcome = Outcome::arrived;
        res.time = 0.0;
        res.J = kruzkov_cost(0.0, params.alpha);
        res.rho = 0.0;
        res.J_hat = res.J;
        res.final_state = s;
        return res;
    }
    if (in_collision(env, s.x1, s.x2, params.footprint)) {
        res.outcome = Outcome::collided;
        res.time = 0.0;
        res.J = 1.0;
        res.rho = distance_to_goal(s.x1, s.x2);
        res.J_hat = 0.1 * res.rho + res.J;
        res.final_state = s;
        return res;
    }

    const int max_steps = static_cast<int>(std::lround(params.t_max / params.dt));
    for (int step = 1; step <= max_steps; ++step) {
        const auto ranges = sense(env, s, params.sensor);
        const auto obs = build_observation(s, ranges);
        const double u = policy(obs);
        const double d = field.at(s.x1, s.x2);
        const RobotState prev = s;
        s = std::isfinite(u) ? integrate_step(s, u, d, params.dt, params.car)
                             : RobotState{std::nan(""), std::nan(""), std::nan("")};
        if (trajectory) trajectory->push_back(s);
        res.steps = step;

        if (!std::isfinite(s.x1) || !std::isfinite(s.x2) || !std::isfinite(s.x3)) {
            res.outcome = Outcome::collided;
            res.non_finite = true;
            res.time = step * params.dt;
            res.J = 1.0;
            res.rho = distance_to_goal(prev.x1, prev.x2);
            res.final_state = prev;
            res.J_hat = 0.1 * res.rho + res.J;
            return res;
        }
        if (at_goal(s.x1, s.x2)) {
            res.outcome = Outcome::arrived;
            res.time = step * params.dt;
            res.J = kruzkov_cost(res.time, params.alpha);
            res.rho = 0.0;
            res.final_state = s;
            res.J_hat = res.J;
            return res;
        }
        if (in_collision(env, s.x1, s.x2, params.footprint)) {
            res.outcome = Outcome::collided;
            res.time = step * params.dt;
            res.J = 1.0;
            res.rho = distance_to_goal(s.x1, s.x2);
            res.final_state = s;
            res.J_hat = 0.1 * res.rho + res.J;
            return res;
        }
    }

    res.outcome = Outcome::timeout;
    res.steps = max_steps;
    res.time = params.t_max;
    res.J = 1.0;
    res.rho = distance_to_goal(s.x1, s.x2);
    res.final_state = s;
    res.J_hat = 0.1 * res.rho + res.J;
    return res;
}

}  // namespace fedgen
