#pragma once

#include <functional>
#include <span>
#include <vector>

#include "fedgen/envgen.hpp"

namespace fedgen {

// Planar car pose: position (x1, x2), heading x3 in (-pi, pi].
struct RobotState {
    double x1 = 0.0;
    double x2 = 0.0;
    double x3 = 0.0;
};

struct CarParams {
    double speed = 2.5;               // constant forward speed
    double wheelbase = 0.08;
    double u_max = 0.7853981633974483;  // steering limit, pi/4
};

enum class SensorFan {
    asymmetric,  // beam phi at heading - pi/3 + (phi-1)*pi/60, spans [-60deg, -3deg]
    symmetric,   // step pi/30 instead, spans [-60deg, +54deg]
};

struct SensorParams {
    int beams = 20;
    double range = 5.0;
    SensorFan fan = SensorFan::asymmetric;
};

struct RolloutParams {
    double dt = 0.05;
    double t_max = 20.0;
    double alpha = 1.0;      // arrival-time cost scale in 1 - exp(-alpha*t)
    double footprint = 0.0;  // robot radius added to obstacles and walls
    CarParams car;
    SensorParams sensor;
};

// One explicit-Euler step of
//   x1' = v cos(x3) + d,  x2' = v sin(x3),  x3' = tan(u) / wheelbase
// with the steering command clamped to [-u_max, u_max] and the disturbance d
// evaluated by the caller at the pre-step position. Heading wraps to
// (-pi, pi].
RobotState integrate_step(const RobotState& s, double u, double d, double dt, const CarParams& car);

double wrap_angle(double a);

// Beam distances to the nearest obstacle circle or wall segment, capped at
// sensor range. The three walls (left, right, bottom) block beams; the open
// top edge does not.
std::vector<double> sense(const EnvironmentSpec& env, const RobotState& s, const SensorParams& sensor);

// Policy input: (x1, x2, sin x3, cos x3, beam distances...).
std::vector<double> build_observation(const RobotState& s, std::span<const double> ranges);

// Bounded arrival-time cost: 1 - exp(-alpha*t), with t = +inf mapping to 1.
double kruzkov_cost(double t, double alpha);

// Distance from a point to the goal segment (the open top edge).
double distance_to_goal(double x1, double x2);

bool in_collision(const EnvironmentSpec& env, double x1, double x2, double footprint);
bool at_goal(double x1, double x2);

enum class Outcome { arrived, collided, timeout };

// A concrete episode setup: environment, its disturbance realization, and a
// start pose. Training batches and evaluation sets are lists of these.
struct EnvCase {
    EnvironmentSpec spec;
    DisturbanceField field;
    RobotState start;
};

struct RolloutResult {
    Outcome outcome = Outcome::timeout;
    int steps = 0;
    double time = 0.0;    // arrival time; t_max on timeout, crash time on collision
    double J = 1.0;       // kruzkov cost; exactly 1 unless arrived
    double rho = 0.0;     // terminal distance to the goal segment; 0 when arrived
    double J_hat = 1.0;   // shaped cost 0.1*rho + J
    RobotState final_state;
    bool non_finite = false;  // dynamics blew up; scored as a collision
};

using SteeringPolicy = std::function<double(std::span<const double> observation)>;

// Closed-loop episode: sense, apply the policy, integrate, then test arrival
// (crossing the top edge inside the arena), collision (obstacle or
// left/right/bottom wall contact), and finally the step budget t_max/dt.
RolloutResult run_rollout(const EnvironmentSpec& env, const DisturbanceField& field,
                          const RobotState& start, const SteeringPolicy& policy,
                          const RolloutParams& params, std::vector<RobotState>* trajectory = nullptr);

}  // namespace fedgen
