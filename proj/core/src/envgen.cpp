#include "fedgen/envgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "fedgen/io.hpp"

namespace fedgen {

namespace {

constexpr std::uint64_t kTrainTag = 0x545241494eULL;  // "TRAIN"
constexpr std::uint64_t kEvalTag = 0x4556414cULL;     // "EVAL"
constexpr double kTwoPi = 6.283185307179586476925286766559;

void validate_params(const DisturbanceParams& p) {
    if (!(p.sigma_d >= 0.0)) throw std::invalid_argument("disturbance: sigma_d must be >= 0");
    if (!(p.corr_length > 0.0)) throw std::invalid_argument("disturbance: corr_length must be > 0");
    if (!(p.grid_res > 0.0)) throw std::invalid_argument("disturbance: grid_res must be > 0");
    if (!(p.d_max >= 0.0)) throw std::invalid_argument("disturbance: d_max must be >= 0");
    if (p.modes <= 0) throw std::invalid_argument("disturbance: modes must be positive");
}

}  // namespace

EnvironmentSpec sample_environment(std::uint64_t seed, const DisturbanceParams& params) {
    validate_params(params);
    EnvironmentSpec env;
    env.seed = seed;
    env.disturbance = params;

    RngStream rng = RngStream(seed).derive(0x4f425354ULL);  // "OBST"
    const int count = rng.uniform_int(15, 30);
    env.obstacles.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        double cx = rng.uniform(arena::x1_min, arena::x1_max);
        double cy = rng.uniform(2.0, arena::x2_max);
        while (cy > 9.7) {  // keep the goal edge reachable
            cx = rng.uniform(arena::x1_min, arena::x1_max);
            cy = rng.uniform(2.0, arena::x2_max);
        }
        const double r = rng.uniform(0.1, 0.25);
        env.obstacles.push_back(Obstacle{cx, cy, r});
    }
    return env;
}

DisturbanceField::DisturbanceField(std::uint64_t seed, const DisturbanceParams& params)
    : params_(params) {
    validate_params(params);
    nx_ = static_cast<int>(std::lround((arena::x1_max - arena::x1_min) / params.grid_res)) + 1;
    ny_ = static_cast<int>(std::lround((arena::x2_max - arena::x2_min) / params.grid_res)) + 1;
    grid_.assign(static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_), 0.0);
    if (params.sigma_d == 0.0 || params.d_max == 0.0) return;

    // Tabulated inverse CDF of the radial wavenumber density
    // p(k) ~ k * (1 + (L k)^2)^(-5/6) on (0, k_max], k_max = pi / grid_res.
    const double k_max = 3.141592653589793 / params.grid_res;
    constexpr int kBins = 2048;
    std::vector<double> cdf(kBins + 1, 0.0);
    const double dk = k_max / kBins;
    for (int b = 1; b <= kBins; ++b) {
        const double k = b * dk;
        const double lk = params.corr_length * k;
        const double density = k * std::pow(1.0 + lk * lk, -5.0 / 6.0);
        cdf[static_cast<std::size_t>(b)] = cdf[static_cast<std::size_t>(b) - 1] + density;
    }
    const double total = cdf.back();
    for (auto& c : cdf) c /= total;

    RngStream rng = RngStream(seed).derive(0x57494e44ULL);  // "WIND"
    const double amp = params.sigma_d * std::sqrt(2.0 / params.modes);
    for (int m = 0; m < params.modes; ++m) {
        const double u = rng.next_unit();
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        std::size_t hi = std::min(static_cast<std::size_t>(it - cdf.begin()),
                                  static_cast<std::size_t>(kBins));
        if (hi == 0) hi = 1;
        const double span = cdf[hi] - cdf[hi - 1];
        const double frac = span > 0.0 ? (u - cdf[hi - 1]) / span : 0.0;
        const double k = (static_cast<double>(hi - 1) + frac) * dk;

        const double psi = rng.uniform(0.0, kTwoPi);
        const double phase = rng.uniform(0.0, kTwoPi);
        const double kx = k * std::cos(psi);
        const double ky = k * std::sin(psi);

        // Accumulate amp*cos(kx*x1 + ky*x2 + phase) over the grid, advancing
        // along each row by a rotation instead of a cos() per node.
        const double cd = std::cos(kx * params.grid_res);
        const double sd = std::sin(kx * params.grid_res);
        for (int iy = 0; iy < ny_; ++iy) {
            const double x2 = arena::x2_min + iy * params.grid_res;
            const double a0 = kx * arena::x1_min + ky * x2 + phase;
            double c = std::cos(a0);
            double s = std::sin(a0);
            double* row = grid_.data() + static_cast<std::size_t>(iy) * nx_;
            for (int ix = 0; ix < nx_; ++ix) {
                row[ix] += amp * c;
                const double cn = c * cd - s * sd;
                s = s * cd + c * sd;
                c = cn;
            }
        }
    }
    for (auto& v : grid_) v = std::clamp(v, -params.d_max, params.d_max);
}

double DisturbanceField::at(double x1, double x2) const {
    const double gx = std::clamp((x1 - arena::x1_min) / params_.grid_res, 0.0,
                                 static_cast<double>(nx_ - 1));
    const double gy = std::clamp((x2 - arena::x2_min) / params_.grid_res, 0.0,
                                 static_cast<double>(ny_ - 1));
    int ix = static_cast<int>(gx);
    int iy = static_cast<int>(gy);
    if (ix >= nx_ - 1) ix = nx_ - 2;
    if (iy >= ny_ - 1) iy = ny_ - 2;
    if (nx_ < 2 || ny_ < 2) return grid_.empty() ? 0.0 : grid_[0];
    const double fx = gx - ix;
    const double fy = gy - iy;
    const double* row0 = grid_.data() + static_cast<std::size_t>(iy) * nx_;
    const double* row1 = row0 + nx_;
    const double v0 = row0[ix] * (1.0 - fx) + row0[ix + 1] * fx;
    const double v1 = row1[ix] * (1.0 - fx) + row1[ix + 1] * fx;
    return v0 * (1.0 - fy) + v1 * fy;
}

InitialState sample_initial_state(const EnvironmentSpec& env, RngStream& rng) {
    constexpr double clearance = 0.3;
    for (int tries = 0; tries < 1000; ++tries) {
        InitialState s;
        s.x1 = rng.uniform(-4.0, 4.0);
        bool clear = true;
        for (const auto& o : env.obstacles) {
            const double dx = s.x1 - o.cx;
            const double dy = s.x2 - o.cy;
            if (std::sqrt(dx * dx + dy * dy) - o.r < clearance) {
                clear = false;
                break;
            }
        }
        if (clear) return s;
    }
    throw std::runtime_error("sample_initial_state: no clear start found after 1000 draws");
}

std::string serialize_environment(const EnvironmentSpec& env) {
    std::string out = "fedgen-env v1\n";
    out += "seed " + std::to_string(env.seed) + "\n";
    const auto& d = env.disturbance;
    out += "disturbance " + format_double(d.sigma_d) + " " + format_double(d.corr_length) + " " +
           format_double(d.grid_res) + " " + format_double(d.d_max) + " " + std::to_string(d.modes) +
           "\n";
    out += "obstacles " + std::to_string(env.obstacles.size()) + "\n";
    for (const auto& o : env.obstacles)
        out += format_double(o.cx) + " " + format_double(o.cy) + " " + format_double(o.r) + "\n";
    return out;
}

EnvironmentSpec parse_environment(std::string_view text) {
    const auto lines = split_lines(text);
    std::size_t ln = 0;
    auto next_fields = [&]() {
        while (ln < lines.size()) {
            auto f = split_ws(lines[ln++]);
            if (!f.empty()) return f;
        }
        throw std::invalid_argument("environment record: unexpected end of input");
    };

    auto header = next_fields();
    if (header.size() != 2 || header[0] != "fedgen-env" || header[1] != "v1")
        throw std::invalid_argument("environment record: unsupported header");

    EnvironmentSpec env;
    auto seed_line = next_fields();
    if (seed_line.size() != 2 || seed_line[0] != "seed")
        throw std::invalid_argument("environment record: expected 'seed <n>'");
    env.seed = parse_u64(seed_line[1]);

    auto dist = next_fields();
    if (dist.size() != 6 || dist[0] != "disturbance")
        throw std::invalid_argument("environment record: expected disturbance line");
    env.disturbance.sigma_d = parse_double(dist[1]);
    env.disturbance.corr_length = parse_double(dist[2]);
    env.disturbance.grid_res = parse_double(dist[3]);
    env.disturbance.d_max = parse_double(dist[4]);
    env.disturbance.modes = static_cast<int>(parse_int(dist[5]));

    auto obs_line = next_fields();
    if (obs_line.size() != 2 || obs_line[0] != "obstacles")
        throw std::invalid_argument("environment record: expected obstacle count");
    const std::int64_t count = parse_int(obs_line[1]);
    if (count < 0) throw std::invalid_argument("environment record: negative obstacle count");
    env.obstacles.reserve(static_cast<std::size_t>(count));
    for (std::int64_t i = 0; i < count; ++i) {
        auto f = next_fields();
        if (f.size() != 3) throw std::invalid_argument("environment record: bad obstacle line");
        Obstacle o{parse_double(f[0]), parse_double(f[1]), parse_double(f[2])};
        if (o.r <= 0.0) throw std::invalid_argument("environment record: obstacle radius must be > 0");
        env.obstacles.push_back(o);
    }
    validate_params(env.disturbance);
    return env;
}

void save_environment(const EnvironmentSpec& env, const std::filesystem::path& file) {
    write_text_file(file, serialize_environment(env));
}

EnvironmentSpec load_environment(const std::filesystem::path& file) {
    try {
        return parse_environment(read_text_file(file));
    } catch (const std::exception& e) {
        throw std::runtime_error(file.string() + ": " + e.what());
    }
}

void write_corpus(const std::filesystem::path& dir, int count, std::uint64_t corpus_seed,
                  const DisturbanceParams& params) {
    if (count <= 0) throw std::invalid_argument("write_corpus: count must be positive");
    std::filesystem::create_directories(dir);
    for (int i = 0; i < count; ++i) {
        const std::uint64_t seed = RngStream(corpus_seed).derive(0x434f5250ULL, static_cast<std::uint64_t>(i)).next_u64();
        char name[32];
        std::snprintf(name, sizeof(name), "env_%05d.txt", i);
        save_environment(sample_environment(seed, params), dir / name);
    }
}

std::vector<EnvironmentSpec> load_corpus(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        if (name.rfind("env_", 0) == 0 && name.size() > 8 && name.ends_with(".txt"))
            files.push_back(entry.path());
    }
    if (files.empty()) throw std::runtime_error("load_corpus: no env_*.txt files in " + dir.string());
    std::sort(files.begin(), files.end());
    std::vector<EnvironmentSpec> out;
    out.reserve(files.size());
    for (const auto& f : files) out.push_back(load_environment(f));
    return out;
}

RngStream init_state_stream(const EnvironmentSpec& env, int index) {
    return RngStream(env.seed).derive(0x494e4954ULL, static_cast<std::uint64_t>(index));  // "INIT"
}

std::uint64_t train_env_seed(std::uint64_t master_seed, int learner, int index) {
    return RngStream(master_seed)
        .derive(kTrainTag, static_cast<std::uint64_t>(learner), static_cast<std::uint64_t>(index))
        .next_u64();
}

std::uint64_t eval_env_seed(std::uint64_t master_seed, int index) {
    return RngStream(master_seed).derive(kEvalTag, static_cast<std::uint64_t>(index)).next_u64();
}

}  // namespace fedgen
