#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "entire_dyn.hpp"

using namespace entire_dyn;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* tool_version = "1.0.0";

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- output

class Csv {
public:
    using Cell = std::variant<std::string, double, long long>;

    explicit Csv(std::vector<std::string> header) : header_(std::move(header)) {}

    void row(std::vector<Cell> cells)
    {
        if (cells.size() != header_.size()) {
            throw std::logic_error("csv row width mismatch");
        }
        rows_.push_back(std::move(cells));
    }

    std::string str() const
    {
        std::string out;
        for (std::size_t i = 0; i < header_.size(); ++i) {
            out += (i ? "," : "") + header_[i];
        }
        out += "\n";
        for (const auto& r : rows_) {
            for (std::size_t i = 0; i < r.size(); ++i) {
                out += (i ? "," : "") + format(r[i]);
            }
            out += "\n";
        }
        return out;
    }

    static std::string format(const Cell& c)
    {
        if (const auto* s = std::get_if<std::string>(&c)) {
            return *s;
        }
        if (const auto* i = std::get_if<long long>(&c)) {
            return std::to_string(*i);
        }
        const double x = std::get<double>(c);
        if (std::isnan(x)) {
            return "nan";
        }
        if (std::isinf(x)) {
            return x > 0 ? "inf" : "-inf";
        }
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.12g", x);
        return buf;
    }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<Cell>> rows_;
};

struct RunContext {
    std::string command;
    std::string prefix;
    Parallelism par;
    json config = json::object();
    json results = json::object();
    json legend = json::object();
    std::vector<std::string> outputs;

    void write_file(const std::string& suffix, const std::string& bytes)
    {
        const std::string path = prefix + suffix;
        std::ofstream os(path, std::ios::binary);
        os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!os) {
            throw ConfigError("cannot write " + path);
        }
        outputs.push_back(path);
    }

    void write_csv(const std::string& suffix, const Csv& csv) { write_file(suffix, csv.str()); }

    // P5, rows top first, 0 / 255 / 128 per the legend.
    void write_pgm(int width, int height, const std::vector<std::uint8_t>& pixels)
    {
        std::string bytes = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
        bytes.append(reinterpret_cast<const char*>(pixels.data()), pixels.size());
        write_file(".pgm", bytes);
    }
};

// ---------------------------------------------------------------- parsing helpers

std::vector<double> parse_reals(const std::string& text, std::size_t expected, const std::string& what)
{
    std::vector<double> out;
    std::string item;
    std::stringstream ss(text);
    while (std::getline(ss, item, ',')) {
        out.push_back(io_detail::parse_real(item));
    }
    if (expected && out.size() != expected) {
        throw ConfigError(what + " expects " + std::to_string(expected) + " comma-separated numbers");
    }
    return out;
}

int checked_resolution(int r)
{
    if (r < 1 || r > 16384) {
        throw ConfigError("--resolution must lie in [1, 16384]");
    }
    return r;
}

WindowSpec parse_window(const std::string& text)
{
    const auto v = parse_reals(text, 4, "--window");
    return WindowSpec(v[0], v[1], v[2], v[3]);
}

AnnulusSpec parse_annulus(const std::string& text)
{
    const auto v = parse_reals(text, 2, "--annulus");
    return AnnulusSpec(v[0], v[1]);
}

FunctionSpec builtin_or_parse(const std::string& text)
{
    if (text == "sin") {
        return FunctionSpec::sine();
    }
    if (text == "exp") {
        return FunctionSpec::poincare(PolynomialSpec(std::vector<Complex>{0.0, 0.0, 1.0}), 1.0, 2.0);
    }
    if (text == "cosh-sqrt") {
        return FunctionSpec::poincare(PolynomialSpec(std::vector<Complex>{-1.0, 0.0, 2.0}), 1.0, 4.0);
    }
    if (text.find('=') == std::string::npos) {
        std::ifstream is(text);
        if (!is) {
            throw ConfigError("--function: '" + text + "' is neither a builtin, a config block nor a readable file");
        }
        std::stringstream buf;
        buf << is.rdbuf();
        return parse_function(buf.str());
    }
    return parse_function(text);
}

json ext_json(const ExtReal& x)
{
    const ExtReal c = x.canonical();
    return json{{"level", c.level()}, {"base", c.base()}};
}

// Grid of pixel centres, row 0 at the top of the window.
Complex pixel_center(const WindowSpec& w, int res, int col, int row)
{
    return {w.x_min + (col + 0.5) * (w.x_max - w.x_min) / res, w.y_max - (row + 0.5) * (w.y_max - w.y_min) / res};
}

// ---------------------------------------------------------------- subcommands

struct Common {
    std::string function = "sin";
    std::string out = "entire_dyn";
    int workers = -1;
};

struct EscapeRender {
    std::string window = "0,3.141592653589793,0,10";
    int resolution = 512;
    int max_iter = 50;
    double bailout = 1e10;

    void run(RunContext& ctx, const FunctionSpec& f) const
    {
        const WindowSpec w = parse_window(window);
        ctx.config["window"] = window;
        ctx.config["resolution"] = checked_resolution(resolution);
        ctx.config["max_iter"] = max_iter;
        ctx.config["bailout"] = bailout;
        const ExtReal b = ExtReal::from_double(bailout);
        std::vector<std::uint8_t> px(static_cast<std::size_t>(resolution) * resolution);
        parallel_for(static_cast<std::size_t>(resolution), ctx.par, [&](std::size_t row) {
            for (int col = 0; col < resolution; ++col) {
                const OrbitStatus s = classify_escape(f, pixel_center(w, resolution, col, static_cast<int>(row)),
                                                      max_iter, b);
                px[row * resolution + col] = s == OrbitStatus::escaping ? 0 : s == OrbitStatus::bounded ? 255 : 128;
            }
        });
        long long counts[3] = {0, 0, 0};
        for (std::uint8_t v : px) {
            ++counts[v == 0 ? 0 : v == 255 ? 1 : 2];
        }
        const double n = static_cast<double>(px.size());
        Csv csv({"resolution", "escaping_fraction", "bounded_fraction", "undecided_fraction", "escaping_area"});
        csv.row({static_cast<long long>(resolution), counts[0] / n, counts[1] / n, counts[2] / n,
                 counts[0] / n * w.area()});
        ctx.legend = {{"0", "escaping"}, {"255", "bounded (cycle or invariant)"}, {"128", "undecided"}};
        ctx.results["escaping_fraction"] = counts[0] / n;
        ctx.write_pgm(resolution, resolution, px);
        ctx.write_csv(".csv", csv);
    }
};

struct FastEscapeRender {
    std::string window = "-5,15,-10,10";
    int resolution = 256;
    int max_iter = 8;
    int L_max = 3;
    double R = 3.0;

    void run(RunContext& ctx, const FunctionSpec& f) const
    {
        const WindowSpec w = parse_window(window);
        ctx.config["window"] = window;
        ctx.config["resolution"] = checked_resolution(resolution);
        ctx.config["max_iter"] = max_iter;
        ctx.config["L_max"] = L_max;
        ctx.config["R"] = R;
        if (max_iter > 100) {
            throw PreconditionError("fast-escape-render: --max-iter must be at most 100");
        }
        const std::vector<ExtReal> M = m_iterates(f, R, max_iter);
        std::vector<int> level(static_cast<std::size_t>(resolution) * resolution, -1);
        parallel_for(static_cast<std::size_t>(resolution), ctx.par, [&](std::size_t row) {
            for (int col = 0; col < resolution; ++col) {
                const FastEscapeResult r =
                    classify_fast_escape(f, pixel_center(w, resolution, col, static_cast<int>(row)), M, L_max);
                level[row * resolution + col] = r.detected ? r.L : -1;
            }
        });
        std::vector<std::uint8_t> px(level.size());
        std::vector<long long> hist(static_cast<std::size_t>(L_max) + 2, 0);
        for (std::size_t i = 0; i < level.size(); ++i) {
            px[i] = level[i] >= 0 ? 0 : 255;
            ++hist[level[i] >= 0 ? static_cast<std::size_t>(level[i]) : hist.size() - 1];
        }
        Csv csv({"L", "pixels", "fraction"});
        const double n = static_cast<double>(level.size());
        for (int L = 0; L <= L_max; ++L) {
            csv.row({std::to_string(L), hist[static_cast<std::size_t>(L)], hist[static_cast<std::size_t>(L)] / n});
        }
        csv.row({std::string("not_detected"), hist.back(), hist.back() / n});
        json m = json::array();
        for (const ExtReal& x : M) {
            m.push_back(ext_json(x));
        }
        ctx.results["m_iterates"] = m;
        ctx.results["detected_fraction"] = 1.0 - hist.back() / n;
        ctx.legend = {{"0", "fast escaping detected"}, {"255", "not detected (semi-decision)"}};
        ctx.write_pgm(resolution, resolution, px);
        ctx.write_csv(".csv", csv);
    }
};

struct CriterionDecay {
    std::string set = "W";
    double epsilon = 0.25;
    double R = 2.0;
    std::string x_threshold = "rho";
    std::string y_threshold = "linear";
    std::string n_oracle = "closed";
    double C = 0.0;
    int k_min = 4;
    int k_max = 9;
    int resolution = 512;
    long long samples = 0;
    long long seed = 1;

    CriterionParams params(const FunctionSpec& f) const
    {
        CriterionParams p;
        p.epsilon = epsilon;
        p.R = R;
        p.x_threshold = x_threshold == "n" ? XThreshold::power_n : XThreshold::power_rho;
        p.y_threshold = y_threshold == "stretched" ? YThreshold::stretched
            : y_threshold == "rho"                 ? YThreshold::power_rho
                                                   : YThreshold::linear;
        if (p.x_threshold == XThreshold::power_n) {
            p.n_oracle = n_oracle == "bound" ? NrOracle::bound_3d1(f, C) : NrOracle::closed_form(f);
        }
        return p;
    }

    void run(RunContext& ctx, const FunctionSpec& f) const
    {
        ctx.config["set"] = set;
        ctx.config["epsilon"] = epsilon;
        ctx.config["R"] = R;
        ctx.config["x_threshold"] = x_threshold;
        ctx.config["y_threshold"] = y_threshold;
        ctx.config["n_oracle"] = n_oracle;
        ctx.config["C"] = C;
        ctx.config["k_min"] = k_min;
        ctx.config["k_max"] = k_max;
        ctx.config["resolution"] = checked_resolution(resolution);
        ctx.config["samples"] = samples;
        ctx.config["seed"] = seed;
        const CriterionParams p = params(f);
        std::function<bool(Complex)> pred;
        if (set == "W") {
            pred = [&](Complex z) { return !in_X_and_Y(f, z, p).both(); };
        } else if (set == "strip") {
            pred = [](Complex z) { return std::abs(z.imag()) < std::log(4.0 * std::abs(z) + 1.0); };
        } else if (set == "not-X") {
            pred = [&](Complex z) { return !in_X(f, z, p).holds; };
        } else if (set == "not-Y") {
            pred = [&](Complex z) { return !in_Y(f, z, p); };
        } else {
            throw ConfigError("--set must be W, strip, not-X or not-Y");
        }
        const DecayProfile prof = annulus_decay_profile(pred, k_min, k_max, resolution, ctx.par);
        std::vector<std::string> header{"k", "r_inner", "r_outer", "logarea", "grid_delta", "ratio", "partial_sum"};
        if (samples > 0) {
            header.insert(header.end(), {"mc_logarea", "mc_std_error"});
        }
        Csv csv(header);
        for (std::size_t i = 0; i < prof.entries.size(); ++i) {
            const DecayEntry& e = prof.entries[i];
            std::vector<Csv::Cell> row{static_cast<long long>(e.k), std::ldexp(1.0, e.k), std::ldexp(1.0, e.k + 1),
                                       e.estimate.value, e.estimate.grid_delta,
                                       i == 0 ? std::numeric_limits<double>::quiet_NaN() : prof.ratios[i - 1],
                                       prof.partial_sums[i]};
            if (samples > 0) {
                const AreaEstimate mc = logarea_monte_carlo(pred, AnnulusSpec(std::ldexp(1.0, e.k), std::ldexp(1.0, e.k + 1)),
                                                            static_cast<std::uint64_t>(samples),
                                                            static_cast<std::uint64_t>(seed) + static_cast<std::uint64_t>(e.k),
                                                            ctx.par);
                row.insert(row.end(), {mc.value, mc.std_error});
            }
            csv.row(std::move(row));
        }
        ctx.results["tail_estimate"] = prof.tail_estimate;
        ctx.results["total"] = prof.partial_sums.back();
        ctx.write_csv(".csv", csv);
    }
};

struct AreaWindowCmd {
    std::string window = "0,3.141592653589793,0,10";
    int resolution = 512;
    int max_iter = 50;
    double bailout = 1e10;

    void run(RunContext& ctx, const FunctionSpec& f) const
    {
        const WindowSpec w = parse_window(window);
        ctx.config["window"] = window;
        ctx.config["resolution"] = checked_resolution(resolution);
        ctx.config["max_iter"] = max_iter;
        ctx.config["bailout"] = bailout;
        const ExtReal b = ExtReal::from_double(bailout);
        const AreaEstimate est = area_window(
            [&](Complex z) { return classify_escape(f, z, max_iter, b) == OrbitStatus::escaping; }, w, resolution,
            ctx.par);
        Csv csv({"resolution", "area", "fraction", "grid_delta", "hits", "samples"});
        csv.row({static_cast<long long>(resolution), est.value, est.value / w.area(), est.grid_delta,
                 static_cast<long long>(est.hits), static_cast<long long>(est.samples)});
        ctx.results["area"] = est.value;
        ctx.write_csv(".csv", csv);
    }
};

struct SigmaRegion {
    std::string window = "-1.5,1.5,0,2.2";
    int resolution = 600;

    void run(RunContext& ctx) const
    {
        const WindowSpec w = parse_window(window);
        ctx.config["window"] = window;
        ctx.config["resolution"] = checked_resolution(resolution);
        const weierstrass::RegionRaster raster = weierstrass::region_raster(w, resolution, ctx.par);
        std::vector<std::uint8_t> px(raster.cells.size());
        long long inside = 0;
        long long unknown = 0;
        for (std::size_t i = 0; i < px.size(); ++i) {
            const auto c = raster.cells[i];
            px[i] = c == weierstrass::RegionCell::inside ? 0 : c == weierstrass::RegionCell::outside ? 255 : 128;
            inside += c == weierstrass::RegionCell::inside;
            unknown += c == weierstrass::RegionCell::unknown;
        }
        const auto [lo, hi] = weierstrass::imaginary_axis_boundary(1.0, 3.0);
        const double n = static_cast<double>(px.size());
        Csv csv({"resolution", "inside_fraction", "unknown_fraction", "axis_boundary_lo", "axis_boundary_hi"});
        csv.row({static_cast<long long>(resolution), inside / n, unknown / n, lo, hi});
        ctx.legend = {{"0", "Re(1/eta1) >= Im(tau)/(2 pi)"}, {"255", "condition fails"}, {"128", "not evaluated"}};
        ctx.results["axis_boundary"] = {lo, hi};
        ctx.write_pgm(resolution, resolution, px);
        ctx.write_csv(".csv", csv);
    }
};

struct SigmaBounds {
    std::string tau = "0,1";
    std::string annulus = "10,100";
    double split = 50.0;
    long long samples = 100000;
    long long seed = 1;

    void run(RunContext& ctx) const
    {
        const AnnulusSpec a = parse_annulus(annulus);
        ctx.config["tau"] = tau;
        ctx.config["annulus"] = annulus;
        ctx.config["split"] = split;
        ctx.config["samples"] = samples;
        ctx.config["seed"] = seed;
        if (!(a.r_inner < split && split < a.r_outer)) {
            throw ConfigError("--split must lie inside the annulus");
        }
        const weierstrass::LatticeContext lat(parse_complex(tau));
        Csv csv({"r_lo", "r_hi", "c1", "c2", "used_c1", "used_c2", "samples"});
        for (auto [lo, hi] : {std::pair{a.r_inner, split}, std::pair{split, a.r_outer}, std::pair{a.r_inner, a.r_outer}}) {
            const auto rep = weierstrass::verify_theorem7_bounds(lat, lo, hi, static_cast<std::uint64_t>(samples),
                                                                 static_cast<std::uint64_t>(seed), ctx.par);
            csv.row({lo, hi, rep.c1, rep.c2, static_cast<long long>(rep.used_for_c1),
                     static_cast<long long>(rep.used_for_c2), static_cast<long long>(rep.samples)});
        }
        ctx.write_csv(".csv", csv);
    }
};

struct Eta1Cmd {
    std::string taus = "0,1";

    void run(RunContext& ctx) const
    {
        ctx.config["tau"] = taus;
        Csv csv({"tau_re", "tau_im", "eta1_re", "eta1_im", "eta2_re", "eta2_im", "legendre_residual", "condition_8c"});
        for (Complex t : parse_complex_list(taus)) {
            const weierstrass::LatticeContext lat(t);
            csv.row({t.real(), t.imag(), lat.eta1().real(), lat.eta1().imag(), lat.eta2().real(), lat.eta2().imag(),
                     lat.legendre_residual(), static_cast<long long>(weierstrass::condition_8c(lat))});
        }
        ctx.write_csv(".csv", csv);
    }
};

struct PoincareSeriesCmd {
    void run(RunContext& ctx, const FunctionSpec& f) const
    {
        if (f.family() != Family::poincare) {
            throw ConfigError("poincare-series needs a poincare family function");
        }
        const poincare::PoincareFunction& fn = f.as_poincare().fn;
        Csv csv({"n", "re", "im", "abs"});
        const auto c = fn.series.coefficients();
        for (std::size_t n = 0; n < c.size(); ++n) {
            csv.row({static_cast<long long>(n), c[n].real(), c[n].imag(), std::abs(c[n])});
        }
        ctx.results["radius"] = fn.series.radius();
        ctx.results["truncation"] = fn.series.truncation();
        ctx.results["order"] = fn.order();
        ctx.write_csv(".csv", csv);
    }
};

struct VnDecay {
    std::string poly = "-2 0 1";
    double R = 3.0;
    int n_max = 10;
    int resolution = 1024;

    void run(RunContext& ctx) const
    {
        ctx.config["poly"] = poly;
        ctx.config["R"] = R;
        ctx.config["n_max"] = n_max;
        ctx.config["resolution"] = checked_resolution(resolution);
        const PolynomialSpec p(parse_complex_list(poly));
        const poincare::VnReport rep = poincare::vn_area(p, R, n_max, resolution, ctx.par);
        Csv csv({"n", "area", "ratio"});
        for (std::size_t i = 0; i < rep.entries.size(); ++i) {
            const auto& e = rep.entries[i];
            const double ratio = i == 0 || rep.entries[i - 1].estimate.value == 0.0
                ? std::numeric_limits<double>::quiet_NaN()
                : e.estimate.value / rep.entries[i - 1].estimate.value;
            csv.row({static_cast<long long>(e.n), e.estimate.value, ratio});
        }
        ctx.results["theta_hat"] = rep.theta_hat;
        ctx.write_csv(".csv", csv);
    }
};

struct ElRatioCmd {
    double R = 10.0;
    std::string r_list = "5,20,80";
    int resolution = 512;

    void run(RunContext& ctx, const FunctionSpec& f) const
    {
        ctx.config["R"] = R;
        ctx.config["r_list"] = r_list;
        ctx.config["resolution"] = checked_resolution(resolution);
        Csv csv({"r", "logarea", "ratio", "grid_delta"});
        for (const ElRatio& e : el_ratio(f, R, parse_reals(r_list, 0, "--r-list"), resolution, ctx.par)) {
            csv.row({e.r, e.estimate.value, e.ratio, e.estimate.grid_delta});
        }
        ctx.write_csv(".csv", csv);
    }
};

struct TowerCheck {
    double alpha = 0.5;
    double beta = 1.0;
    double x_max = 1e6;
    int points = 100;
    int k_min = 4;
    int k_max = 12;

    void run(RunContext& ctx) const
    {
        ctx.config["alpha"] = alpha;
        ctx.config["beta"] = beta;
        ctx.config["x_max"] = x_max;
        ctx.config["points"] = points;
        ctx.config["k_min"] = k_min;
        ctx.config["k_max"] = k_max;
        if (points < 2 || !(x_max > 1.0)) {
            throw ConfigError("tower-check: need --points >= 2 and --x-max > 1");
        }
        std::vector<double> grid;
        for (int i = 0; i < points; ++i) {
            grid.push_back(std::pow(x_max, static_cast<double>(i) / (points - 1)));
        }
        const TowerLemmaReport rep = verify_tower_lemma(alpha, beta, grid, k_min, k_max);
        Csv csv({"x", "k", "lhs_level", "lhs_base", "rhs_level", "rhs_base", "holds"});
        const double floor_x = std::max(x_alpha(alpha), x_alpha(beta));
        for (double x : grid) {
            if (!(x > floor_x)) {
                continue;
            }
            for (int k = k_min; k <= k_max; ++k) {
                const ExtReal l = tower_apply_E(alpha, ExtReal::from_double(x), k).canonical();
                const ExtReal r = tower_apply_E(beta, ExtReal::from_double(x), k - 2).canonical();
                csv.row({x, static_cast<long long>(k), static_cast<long long>(l.level()), l.base(),
                         static_cast<long long>(r.level()), r.base(), static_cast<long long>(!(l < r))});
            }
        }
        ctx.results["x0"] = rep.x0 ? json(*rep.x0) : json(nullptr);
        ctx.results["violations_below_x0"] = rep.violations_below_x0.size();
        ctx.results["violations_above_x0"] = rep.violations_above_x0;
        ctx.write_csv(".csv", csv);
    }
};

unsigned resolve_workers(int flag)
{
    if (flag >= 0) {
        return static_cast<unsigned>(flag);
    }
    if (const char* env = std::getenv("ENTIRE_DYN_WORKERS")) {
        try {
            const int n = std::stoi(env);
            if (n >= 0) {
                return static_cast<unsigned>(n);
            }
        } catch (const std::exception&) {
        }
        throw ConfigError("ENTIRE_DYN_WORKERS must be a non-negative integer");
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Numerical experiments on the escaping sets of entire functions"};
    app.require_subcommand(1);
    Common common;
    EscapeRender escape;
    FastEscapeRender fast;
    CriterionDecay decay;
    AreaWindowCmd area;
    SigmaRegion region;
    SigmaBounds bounds;
    Eta1Cmd eta;
    PoincareSeriesCmd series;
    VnDecay vn;
    ElRatioCmd el;
    TowerCheck tower;

    const auto add_common = [&](CLI::App* sub, bool uses_function) {
        if (uses_function) {
            sub->add_option("--function", common.function, "builtin (sin, exp, cosh-sqrt), config block or file");
        }
        sub->add_option("--out", common.out, "output path prefix");
        sub->add_option("--workers", common.workers, "worker threads (0 = one per core)");
        return sub;
    };

    auto* s = add_common(app.add_subcommand("escape-render", "escaping / bounded / undecided raster"), true);
    s->add_option("--window", escape.window, "x_min,x_max,y_min,y_max");
    s->add_option("--resolution", escape.resolution);
    s->add_option("--max-iter", escape.max_iter);
    s->add_option("--bailout", escape.bailout);

    s = add_common(app.add_subcommand("fast-escape-render", "fast-escaping semi-decision raster"), true);
    s->add_option("--window", fast.window);
    s->add_option("--resolution", fast.resolution);
    s->add_option("--max-iter", fast.max_iter);
    s->add_option("--L-max", fast.L_max);
    s->add_option("--R", fast.R);

    s = add_common(app.add_subcommand("criterion-decay", "per-annulus logarea of a criterion set"), true);
    s->add_option("--set", decay.set, "W, strip, not-X or not-Y");
    s->add_option("--epsilon", decay.epsilon);
    s->add_option("--R", decay.R);
    s->add_option("--x-threshold", decay.x_threshold, "rho or n");
    s->add_option("--y-threshold", decay.y_threshold, "linear, stretched or rho");
    s->add_option("--n-oracle", decay.n_oracle, "closed or bound");
    s->add_option("--C", decay.C, "additive constant of the log M(er) bound");
    s->add_option("--k-min", decay.k_min);
    s->add_option("--k-max", decay.k_max);
    s->add_option("--resolution", decay.resolution);
    s->add_option("--samples", decay.samples, "Monte Carlo samples per annulus (0 = grid only)");
    s->add_option("--seed", decay.seed);

    s = add_common(app.add_subcommand("area-window", "area of the escaping set in a window"), true);
    s->add_option("--window", area.window);
    s->add_option("--resolution", area.resolution);
    s->add_option("--max-iter", area.max_iter);
    s->add_option("--bailout", area.bailout);

    s = add_common(app.add_subcommand("sigma-region", "raster of the lattice parameter region"), false);
    s->add_option("--window", region.window);
    s->add_option("--resolution", region.resolution);

    s = add_common(app.add_subcommand("sigma-bounds", "lower bounds for log|sigma| and |z zeta|"), false);
    s->add_option("--tau", bounds.tau, "re,im");
    s->add_option("--annulus", bounds.annulus, "r_lo,r_hi");
    s->add_option("--split", bounds.split);
    s->add_option("--samples", bounds.samples);
    s->add_option("--seed", bounds.seed);

    s = add_common(app.add_subcommand("eta1", "quasi-period eta1 and lattice data"), false);
    s->add_option("--tau", eta.taus, "whitespace-separated list of re,im");

    add_common(app.add_subcommand("poincare-series", "Schroeder series coefficients"), true);

    s = add_common(app.add_subcommand("vn-decay", "areas of the polynomial sets V_n"), false);
    s->add_option("--poly", vn.poly, "ascending coefficients, whitespace-separated re,im");
    s->add_option("--R", vn.R);
    s->add_option("--n-max", vn.n_max);
    s->add_option("--resolution", vn.resolution);

    s = add_common(app.add_subcommand("el-ratio", "logarea of a preimage of a disk over log r"), true);
    s->add_option("--R", el.R);
    s->add_option("--r-list", el.r_list, "comma-separated radii");
    s->add_option("--resolution", el.resolution);

    s = add_common(app.add_subcommand("tower-check", "compare iterated E_alpha and E_beta"), false);
    s->add_option("--alpha", tower.alpha);
    s->add_option("--beta", tower.beta);
    s->add_option("--x-max", tower.x_max);
    s->add_option("--points", tower.points);
    s->add_option("--k-min", tower.k_min);
    s->add_option("--k-max", tower.k_max);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    RunContext ctx;
    ctx.command = command;
    ctx.prefix = common.out;
    const auto start = std::chrono::steady_clock::now();
    const auto uses = [&](const char* name) { return command == name; };
    try {
        ctx.par.workers = resolve_workers(common.workers);
        const bool with_f = uses("escape-render") || uses("fast-escape-render") || uses("criterion-decay")
            || uses("area-window") || uses("poincare-series") || uses("el-ratio");
        std::optional<FunctionSpec> f;
        if (with_f) {
            f = builtin_or_parse(common.function);
            ctx.config["function"] = print_function(*f);
        }
        if (uses("escape-render")) {
            escape.run(ctx, *f);
        } else if (uses("fast-escape-render")) {
            fast.run(ctx, *f);
        } else if (uses("criterion-decay")) {
            decay.run(ctx, *f);
        } else if (uses("area-window")) {
            area.run(ctx, *f);
        } else if (uses("sigma-region")) {
            region.run(ctx);
        } else if (uses("sigma-bounds")) {
            bounds.run(ctx);
        } else if (uses("eta1")) {
            eta.run(ctx);
        } else if (uses("poincare-series")) {
            series.run(ctx, *f);
        } else if (uses("vn-decay")) {
            vn.run(ctx);
        } else if (uses("el-ratio")) {
            el.run(ctx, *f);
        } else {
            tower.run(ctx);
        }
    } catch (const NumericalError& e) {
        std::cerr << command << ": numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << command << ": invalid configuration: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << command << ": invalid configuration: " << e.what() << "\n";
        return 2;
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    json manifest;
    manifest["command"] = command;
    manifest["tool_version"] = tool_version;
    manifest["compiler"] = __VERSION__;
    manifest["workers"] = ctx.par.resolved();
    manifest["config"] = ctx.config;
    if (!ctx.legend.empty()) {
        manifest["pgm_legend"] = ctx.legend;
    }
    manifest["results"] = ctx.results;
    manifest["outputs"] = ctx.outputs;
    manifest["elapsed_seconds"] = seconds;
    try {
        ctx.write_file(".manifest.json", manifest.dump(2) + "\n");
    } catch (const ConfigError& e) {
        std::cerr << command << ": " << e.what() << "\n";
        return 2;
    }
    for (const std::string& p : ctx.outputs) {
        std::cout << p << "\n";
    }
    return 0;
}
