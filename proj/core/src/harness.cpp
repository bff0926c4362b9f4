#include "fedgen/harness.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

#include "fedgen/io.hpp"
#include "fedgen/nes.hpp"
#include "fedgen/rng.hpp"
#include "fedgen/rollout.hpp"

namespace fs = std::filesystem;

namespace fedgen::harness {

namespace {

// Substream tags for the run-level seed.
constexpr std::uint64_t kSamplerTag = 0x53414d50;  // "SAMP"
constexpr std::uint64_t kThetaTag = 0x54483030;    // "TH00"
constexpr std::uint64_t kSweepTag = 0x53575030;    // "SWP0"

SyntheticObjective build_objective(const RunConfig& cfg) {
    if (cfg.synthetic_kind == "quadratic_well")
        return make_quadratic_well(static_cast<std::size_t>(cfg.dim), cfg.well_center, cfg.well_gain);
    if (cfg.synthetic_kind == "double_well")
        return make_double_well(cfg.well_m1, cfg.well_d1, cfg.well_m2, cfg.well_d2, cfg.well_base,
                                cfg.well_gain);
    if (cfg.synthetic_kind == "multi_well") {
        SyntheticObjective obj;
        obj.dim = 1;
        obj.base = cfg.well_base;
        obj.gain = cfg.well_gain;
        std::string_view rest = cfg.wells;
        while (!rest.empty()) {
            const auto semi = rest.find(';');
            const std::string_view item = rest.substr(0, semi);
            rest = semi == std::string_view::npos ? std::string_view{} : rest.substr(semi + 1);
            const auto comma = item.find(',');
            if (comma == std::string_view::npos)
                throw std::invalid_argument("multi_well wells: expected m,d pairs separated by ';'");
            obj.centers.push_back({parse_double(item.substr(0, comma))});
            obj.depths.push_back(parse_double(item.substr(comma + 1)));
        }
        obj.validate();
        return obj;
    }
    throw std::invalid_argument("unknown synthetic kind: " + cfg.synthetic_kind);
}

MlpSpec build_mlp(const RunConfig& cfg) {
    MlpSpec mlp;
    mlp.layers = cfg.layers;
    mlp.validate();
    return mlp;
}

RolloutParams build_rollout(const RunConfig& cfg) {
    RolloutParams p;
    p.dt = cfg.dt;
    p.t_max = cfg.t_max;
    p.alpha = cfg.alpha;
    p.footprint = cfg.footprint;
    p.sensor.fan = cfg.sensor_fan == "symmetric" ? SensorFan::symmetric : SensorFan::asymmetric;
    return p;
}

std::string two_digits(int v) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "%02d", v);
    return buf;
}

void append_vector(std::string& out, const char* label, std::span<const double> v) {
    out += label;
    for (const double x : v) {
        out += ' ';
        out += format_double(x);
    }
    out += '\n';
}

double sample_std(std::span<const double> v, double mean) {
    if (v.size() < 2) return 0.0;
    double ss = 0.0;
    for (const double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / (static_cast<double>(v.size()) - 1.0));
}

}  // namespace

std::string rounds_csv_header() {
    return "round,learner,y,z_norm,zeta,stopped,adopted_from,y_hat";
}

std::string format_round_row(const RoundRecord& rec) {
    std::string row;
    row += std::to_string(rec.round);
    row += ',';
    row += std::to_string(rec.learner);
    row += ',';
    row += format_double(rec.y);
    row += ',';
    row += format_double(rec.z_norm);
    row += ',';
    row += format_double(rec.zeta);
    row += ',';
    row += rec.stopped ? '1' : '0';
    row += ',';
    row += std::to_string(rec.adopted_from);
    row += ',';
    if (rec.y_hat) row += format_double(*rec.y_hat);
    return row;
}

void save_checkpoint(const Checkpoint& c, const fs::path& file) {
    std::string out;
    out += c.is_policy ? "fedgen-policy v1\n" : "fedgen-theta v1\n";
    out += "learner " + std::to_string(c.learner) + '\n';
    out += "role " + c.role + '\n';
    out += "iteration " + std::to_string(c.iteration) + '\n';
    out += "y " + format_double(c.y) + '\n';
    out += "gamma " + format_double(c.gamma) + '\n';
    out += "b_gamma " + format_double(c.b_gamma) + '\n';
    if (c.is_policy) {
        out += "layers";
        for (const int l : c.mlp.layers) out += ' ' + std::to_string(l);
        out += '\n';
        out += "out_scale " + format_double(c.mlp.out_scale) + '\n';
        out += "sigma_floor " + format_double(c.sigma_floor) + '\n';
        append_vector(out, "mu", c.mu);
        append_vector(out, "sigma", c.sigma);
    } else {
        append_vector(out, "theta", c.mu);
    }
    write_text_file(file, out);
}

Checkpoint load_checkpoint(const fs::path& file) {
    const std::string text = read_text_file(file);
    Checkpoint c;
    bool magic_seen = false;
    for (const auto line : split_lines(text)) {
        const auto tok = split_ws(line);
        if (tok.empty()) continue;
        if (!magic_seen) {
            if (tok.size() != 2 || tok[1] != "v1" ||
                (tok[0] != "fedgen-policy" && tok[0] != "fedgen-theta"))
                throw std::runtime_error(file.string() + ": not a checkpoint file");
            c.is_policy = tok[0] == "fedgen-policy";
            magic_seen = true;
            continue;
        }
        const auto key = tok[0];
        if (key == "learner") {
            c.learner = static_cast<int>(parse_int(tok.at(1)));
        } else if (key == "role") {
            c.role = std::string(tok.at(1));
        } else if (key == "iteration") {
            c.iteration = static_cast<int>(parse_int(tok.at(1)));
        } else if (key == "y") {
            c.y = parse_double(tok.at(1));
        } else if (key == "gamma") {
            c.gamma = parse_double(tok.at(1));
        } else if (key == "b_gamma") {
            c.b_gamma = parse_double(tok.at(1));
        } else if (key == "sigma_floor") {
            c.sigma_floor = parse_double(tok.at(1));
        } else if (key == "out_scale") {
            c.mlp.out_scale = parse_double(tok.at(1));
        } else if (key == "layers") {
            c.mlp.layers.clear();
            for (std::size_t i = 1; i < tok.size(); ++i)
                c.mlp.layers.push_back(static_cast<int>(parse_int(tok[i])));
        } else if (key == "mu" || key == "theta") {
            c.mu.clear();
            for (std::size_t i = 1; i < tok.size(); ++i) c.mu.push_back(parse_double(tok[i]));
        } else if (key == "sigma") {
            c.sigma.clear();
            for (std::size_t i = 1; i < tok.size(); ++i) c.sigma.push_back(parse_double(tok[i]));
        } else {
            throw std::runtime_error(file.string() + ": unknown checkpoint key '" +
                                     std::string(key) + "'");
        }
    }
    if (!magic_seen) throw std::runtime_error(file.string() + ": empty checkpoint file");
    if (c.is_policy) c.mlp.validate();
    return c;
}

TrainArtifacts run_train(const RunConfig& cfg) {
    validate_run_config(cfg);
    const bool motion = cfg.mode == "motion";

    TrainArtifacts art;
    art.cfg = cfg;
    art.out_dir = cfg.out_dir;
    fs::create_directories(art.out_dir / "checkpoints");
    write_text_file(art.out_dir / "config.cfg", serialize_config(cfg));

    const RngStream master(cfg.seed);
    const int V = cfg.learners;

    // Stop-norm support: in motion mode the sigma-block estimator noise never
    // decays with convergence, so the stop test reads the mu block only
    // unless the config insists on the full vector.
    MlpSpec mlp;
    std::size_t stop_dims = 0;
    if (motion) {
        mlp = build_mlp(cfg);
        if (cfg.stop_norm == "mu") stop_dims = param_count(mlp);
    }

    const LearnerConfig base =
        make_learner_config(cfg.r, cfg.rho, cfg.q, cfg.gamma, cfg.n_env, cfg.n_init, stop_dims);
    std::vector<LearnerConfig> cfgs(V, base);

    std::vector<std::unique_ptr<ObjectiveSampler>> samplers;
    std::vector<const ObjectiveSampler*> ptrs;
    std::vector<ParamVector> theta0;
    std::optional<double> lipschitz;
    SyntheticObjective obj;

    if (motion) {
        const RolloutParams rp = build_rollout(cfg);
        if (mlp.layers.front() != 4 + rp.sensor.beams)
            throw std::invalid_argument("first layer must match the observation size " +
                                        std::to_string(4 + rp.sensor.beams));
        NesParams nes;
        nes.pairs = cfg.pairs;
        nes.sigma_init = cfg.sigma_init;
        nes.sigma_floor = cfg.sigma_floor;

        std::vector<EnvironmentSpec> corpus;
        if (!cfg.env_corpus.empty()) {
            corpus = load_corpus(cfg.env_corpus);
            if (static_cast<int>(corpus.size()) < cfg.n_env)
                throw std::invalid_argument("env corpus holds " + std::to_string(corpus.size()) +
                                            " environments, n_env needs " +
                                            std::to_string(cfg.n_env));
        }

        for (int i = 0; i < V; ++i) {
            if (cfg.resample_each_round) {
                samplers.push_back(std::make_unique<MotionNesSampler>(
                    mlp, nes, rp, cfg.seed, i, cfg.n_env, cfg.n_init, cfg.disturbance,
                    cfg.threads));
            } else if (!corpus.empty()) {
                // A shared benchmark corpus: every learner sees the same
                // n_env environments with its standard per-env start draws.
                std::vector<EnvCase> batch;
                batch.reserve(static_cast<std::size_t>(cfg.n_env) * cfg.n_init);
                for (int e = 0; e < cfg.n_env; ++e) {
                    const EnvironmentSpec& spec = corpus[static_cast<std::size_t>(e)];
                    DisturbanceField field(spec.seed, spec.disturbance);
                    for (int j = 0; j < cfg.n_init; ++j) {
                        auto ir = init_state_stream(spec, j);
                        const InitialState s0 = sample_initial_state(spec, ir);
                        batch.push_back({spec, field, RobotState{s0.x1, s0.x2, s0.x3}});
                    }
                }
                samplers.push_back(std::make_unique<MotionNesSampler>(
                    mlp, nes, rp, std::move(batch), master.derive(kSamplerTag, i).next_u64(),
                    cfg.threads));
            } else {
                samplers.push_back(std::make_unique<MotionNesSampler>(
                    mlp, nes, rp,
                    MotionNesSampler::build_cases(cfg.seed, i, cfg.n_env, cfg.n_init,
                                                  cfg.disturbance),
                    master.derive(kSamplerTag, i).next_u64(), cfg.threads));
            }
            auto init_rng = master.derive(kThetaTag, i);
            const ParamVector mu = init_policy_weights(mlp, init_rng);
            const ParamVector sg(mu.size(), cfg.sigma_init);
            theta0.push_back(make_nes_theta(mu, sg));
        }
    } else {
        obj = build_objective(cfg);
        lipschitz = obj.grad_lipschitz();
        for (int i = 0; i < V; ++i) {
            samplers.push_back(std::make_unique<SyntheticSampler>(
                obj, cfg.n_env * cfg.n_init, cfg.sigma_y, cfg.sigma_z,
                master.derive(kSamplerTag, i).next_u64()));
            auto init_rng = master.derive(kThetaTag, i);
            ParamVector t(obj.dim);
            for (auto& x : t) x = init_rng.uniform(cfg.theta0_lo, cfg.theta0_hi);
            theta0.push_back(std::move(t));
        }
    }
    for (const auto& s : samplers) ptrs.push_back(s.get());

    if (cfg.sigma_probe_repeats >= 2) {
        std::vector<double> sigma_hats;
        for (int i = 0; i < V; ++i) {
            const std::vector<ParamVector> probes{theta0[static_cast<std::size_t>(i)]};
            sigma_hats.push_back(estimate_sigma(*ptrs[static_cast<std::size_t>(i)], probes,
                                                cfg.sigma_probe_repeats));
        }
        art.warnings = validate_config(cfgs, sigma_hats, lipschitz);
    } else {
        art.warnings = validate_config(cfgs, {}, lipschitz);
    }
    if (!art.warnings.empty()) {
        std::string w;
        for (const auto& line : art.warnings) w += line + '\n';
        write_text_file(art.out_dir / "warnings.txt", w);
    }

    std::string csv = "# fedgen-rounds v1\n" + rounds_csv_header() + '\n';
    const RoundObserver observer = [&csv](const RoundRecord& rec) {
        csv += format_round_row(rec);
        csv += '\n';
    };

    art.result = run_fedgen(std::move(theta0), cfgs, ptrs, cfg.rounds, observer, cfg.threads);

    art.rounds_csv = art.out_dir / "rounds.csv";
    write_text_file(art.rounds_csv, csv);

    if (motion) {
        for (const auto& s : samplers)
            art.sigma_floor_hits += static_cast<const MotionNesSampler*>(s.get())->sigma_floor_hits();
    }

    const auto save_snapshot = [&](int learner, const std::string& role, int iteration, double y,
                                   const ParamVector& theta) {
        Checkpoint c;
        c.is_policy = motion;
        c.learner = learner;
        c.role = role;
        c.iteration = iteration;
        c.y = y;
        c.gamma = cfg.gamma;
        c.b_gamma = base.b_gamma;
        if (motion) {
            c.mlp = mlp;
            c.sigma_floor = cfg.sigma_floor;
            const std::size_t n = param_count(mlp);
            c.mu.resize(n);
            c.sigma.resize(n);
            split_nes_theta(theta, c.mu, c.sigma, cfg.sigma_floor);
        } else {
            c.mu = theta;
        }
        const fs::path file = art.out_dir / "checkpoints" /
                              ("learner_" + two_digits(learner) + "_" + role + ".txt");
        save_checkpoint(c, file);
        art.checkpoints.push_back({learner, role, file});
    };

    int total_adoptions = 0;
    for (const auto& lr : art.result.learners) {
        const int id = lr.state.id;
        total_adoptions += static_cast<int>(lr.state.adoptions.size());
        save_snapshot(id, "init", 0, lr.y_init, lr.theta_init);
        if (lr.state.first_stop_iteration)
            save_snapshot(id, "first_stop", *lr.state.first_stop_iteration, lr.state.y_first_stop,
                          lr.state.theta_first_stop);
        const double y_final = lr.state.last ? lr.state.last->y : lr.y_init;
        save_snapshot(id, "final", cfg.rounds, y_final, lr.state.theta);
    }

    std::string rs;
    rs += "fedgen-run v1\n";
    rs += "mode " + cfg.mode + '\n';
    rs += "learners " + std::to_string(V) + '\n';
    rs += "rounds " + std::to_string(cfg.rounds) + '\n';
    rs += "convergence_round ";
    rs += art.result.convergence_round ? std::to_string(*art.result.convergence_round)
                                       : std::string("none");
    rs += '\n';
    rs += "adoptions " + std::to_string(total_adoptions) + '\n';
    rs += "submissions " + std::to_string(art.result.ledger.submissions_seen) + '\n';
    if (motion) rs += "sigma_floor_hits " + std::to_string(art.sigma_floor_hits) + '\n';
    rs += "warnings " + std::to_string(art.warnings.size()) + '\n';
    write_text_file(art.out_dir / "run_state.txt", rs);

    return art;
}

std::vector<EvalRow> run_eval(const RunConfig& cfg, const std::vector<fs::path>& checkpoints,
                              const fs::path& out_csv, const fs::path& episodes_csv,
                              int dump_trajectories) {
    if (checkpoints.empty()) throw std::invalid_argument("eval needs at least one checkpoint");
    const std::uint64_t eval_seed = cfg.eval_seed != 0 ? cfg.eval_seed : cfg.seed;
    const RolloutParams rp = build_rollout(cfg);
    const auto cases = build_eval_cases(eval_seed, cfg.eval_samples, cfg.disturbance);

    std::string csv = "# fedgen-eval v1\n";
    csv +=
        "policy,learner,role,iteration,samples,seed,mean_J,mean_rho_cost,arrival_rate,rate_ci,"
        "j_ci,y_train,b_gamma,gamma,cost_upper,cost_upper_vacuous,arrival_lower,arrival_lower_"
        "vacuous\n";
    std::string ep_csv = "# fedgen-episodes v1\npolicy,case,env_seed,outcome,steps,J,rho,J_hat\n";

    std::vector<EvalRow> rows;
    for (const fs::path& file : checkpoints) {
        const Checkpoint c = load_checkpoint(file);
        if (!c.is_policy)
            throw std::invalid_argument(file.string() + ": eval needs policy checkpoints");
        if (static_cast<int>(c.mu.size()) != static_cast<int>(param_count(c.mlp)))
            throw std::runtime_error(file.string() + ": weight count does not match layers");

        EvalRow row;
        row.policy = file.stem().string();
        row.learner = c.learner;
        row.role = c.role;
        row.iteration = c.iteration;
        std::vector<EvalEpisode> episodes;
        row.report = evaluate_policy(c.mlp, c.mu, cases, rp, eval_seed,
                                     episodes_csv.empty() ? nullptr : &episodes, cfg.threads);
        row.y_train = c.y;
        row.b_gamma = c.b_gamma;
        row.gamma = c.gamma;
        row.cost_upper = bounds::generalization_upper_bound(c.y, c.b_gamma, c.gamma);
        row.arrival_lower = bounds::safe_arrival_lower_bound(c.y, c.b_gamma, c.gamma);

        csv += row.policy + ',' + std::to_string(row.learner) + ',' + row.role + ',' +
               std::to_string(row.iteration) + ',' + std::to_string(row.report.samples) + ',' +
               std::to_string(row.report.seed) + ',' + format_double(row.report.mean_J) + ',' +
               format_double(row.report.mean_rho_cost) + ',' +
               format_double(row.report.arrival_rate) + ',' + format_double(row.report.rate_ci) +
               ',' + format_double(row.report.j_ci) + ',' + format_double(row.y_train) + ',' +
               format_double(row.b_gamma) + ',' + format_double(row.gamma) + ',' +
               format_double(row.cost_upper.value) + ',' + (row.cost_upper.vacuous ? "1" : "0") +
               ',' + format_double(row.arrival_lower.value) + ',' +
               (row.arrival_lower.vacuous ? "1" : "0") + '\n';

        for (std::size_t e = 0; e < episodes.size(); ++e) {
            const auto& ep = episodes[e];
            const char* oc = ep.outcome == Outcome::arrived    ? "arrived"
                             : ep.outcome == Outcome::collided ? "collided"
                                                               : "timeout";
            ep_csv += row.policy + ',' + std::to_string(e) + ',' + std::to_string(ep.env_seed) +
                      ',' + oc + ',' + std::to_string(ep.steps) + ',' + format_double(ep.J) + ',' +
                      format_double(ep.rho) + ',' + format_double(ep.J_hat) + '\n';
        }

        if (dump_trajectories > 0) {
            MlpScratch scratch;
            const fs::path traj_dir = out_csv.parent_path() / "traj";
            const int n_dump = std::min<int>(dump_trajectories, static_cast<int>(cases.size()));
            for (int i = 0; i < n_dump; ++i) {
                std::vector<RobotState> traj;
                const auto policy = [&](std::span<const double> obs) {
                    return mlp_forward(c.mlp, c.mu, obs, scratch);
                };
                run_rollout(cases[static_cast<std::size_t>(i)].spec,
                            cases[static_cast<std::size_t>(i)].field,
                            cases[static_cast<std::size_t>(i)].start, policy, rp, &traj);
                std::string t = "# fedgen-traj v1\nstep,t,x1,x2,x3\n";
                for (std::size_t s = 0; s < traj.size(); ++s) {
                    t += std::to_string(s) + ',' +
                         format_double(static_cast<double>(s) * rp.dt) + ',' +
                         format_double(traj[s].x1) + ',' + format_double(traj[s].x2) + ',' +
                         format_double(traj[s].x3) + '\n';
                }
                write_text_file(traj_dir / (row.policy + "_case" + std::to_string(i) + ".csv"), t);
            }
        }

        rows.push_back(std::move(row));
    }

    write_text_file(out_csv, csv);
    if (!episodes_csv.empty()) write_text_file(episodes_csv, ep_csv);
    return rows;
}

std::vector<SweepRow> run_sweep(const RunConfig& base, const std::vector<int>& counts,
                                const fs::path& out_dir) {
    if (counts.empty()) throw std::invalid_argument("sweep needs at least one learner count");
    const bool motion = base.mode == "motion";
    fs::create_directories(out_dir);

    // Motion runs score final policies on one shared batch of fresh
    // environments; synthetic runs read the landscape directly.
    std::vector<EnvCase> cases;
    RolloutParams rp;
    MlpSpec mlp;
    SyntheticObjective obj;
    if (motion) {
        rp = build_rollout(base);
        mlp = build_mlp(base);
        const std::uint64_t eval_seed = base.eval_seed != 0 ? base.eval_seed : base.seed;
        cases = build_eval_cases(eval_seed, base.eval_samples, base.disturbance);
    } else {
        obj = build_objective(base);
    }

    std::string csv = "# fedgen-sweep v1\n";
    csv += "learners,seed,convergence_round,adoptions,mean_cost,std_cost,min_cost,max_cost,"
           "mean_rate,std_rate\n";

    std::vector<SweepRow> rows;
    for (const int v : counts) {
        RunConfig cfg = base;
        cfg.learners = v;
        cfg.seed = RngStream(base.seed).derive(kSweepTag, static_cast<std::uint64_t>(v)).next_u64();
        cfg.out_dir = (out_dir / ("sweep_v" + two_digits(v))).string();
        const TrainArtifacts art = run_train(cfg);

        SweepRow row;
        row.learners = v;
        row.seed = cfg.seed;
        row.convergence_round = art.result.convergence_round;

        std::vector<double> costs, rates;
        for (const auto& lr : art.result.learners) {
            row.adoptions += static_cast<int>(lr.state.adoptions.size());
            if (motion) {
                ParamVector mu(param_count(mlp)), sg(param_count(mlp));
                split_nes_theta(lr.state.theta, mu, sg, cfg.sigma_floor);
                const EvalReport rep = evaluate_policy(mlp, mu, cases, rp, cfg.seed, nullptr,
                                                       cfg.threads);
                costs.push_back(rep.mean_J);
                rates.push_back(rep.arrival_rate);
            } else {
                costs.push_back(obj.eta(lr.state.theta));
            }
        }
        double mean = 0.0;
        for (const double c : costs) mean += c;
        mean /= static_cast<double>(costs.size());
        row.mean_cost = mean;
        row.std_cost = sample_std(costs, mean);
        row.min_cost = *std::min_element(costs.begin(), costs.end());
        row.max_cost = *std::max_element(costs.begin(), costs.end());
        if (motion) {
            double rmean = 0.0;
            for (const double r : rates) rmean += r;
            rmean /= static_cast<double>(rates.size());
            row.mean_rate = rmean;
            row.std_rate = sample_std(rates, rmean);
        }

        csv += std::to_string(row.learners) + ',' + std::to_string(row.seed) + ',' +
               (row.convergence_round ? std::to_string(*row.convergence_round)
                                      : std::string("none")) +
               ',' + std::to_string(row.adoptions) + ',' + format_double(row.mean_cost) + ',' +
               format_double(row.std_cost) + ',' + format_double(row.min_cost) + ',' +
               format_double(row.max_cost) + ',' +
               (row.mean_rate ? format_double(*row.mean_rate) : std::string()) + ',' +
               (row.std_rate ? format_double(*row.std_rate) : std::string()) + '\n';

        rows.push_back(std::move(row));
    }

    write_text_file(out_dir / "sweep.csv", csv);
    return rows;
}

std::vector<verify::CheckResult> run_verify(const std::vector<std::string>& suites,
                                            std::uint64_t seed) {
    std::vector<std::string> todo = suites;
    if (todo.empty() || (todo.size() == 1 && todo[0] == "all"))
        todo = {"bounds", "optimizer", "nes", "sensor"};

    std::vector<verify::CheckResult> all;
    for (const std::string& name : todo) {
        std::vector<verify::CheckResult> got;
        if (name == "bounds") {
            got = verify::check_bounds(seed);
        } else if (name == "optimizer") {
            got = verify::check_optimizer(seed);
        } else if (name == "nes") {
            got = verify::check_nes(seed);
        } else if (name == "sensor") {
            got = verify::check_sensor(seed);
        } else {
            throw std::invalid_argument("unknown verify suite: " + name);
        }
        for (auto& r : got) {
            r.name = name + "." + r.name;
            all.push_back(std::move(r));
        }
    }
    return all;
}

}  // namespace fedgen::harness
