#include "nls/config.hpp"

#include <cmath>
#include <set>

#include <json.hpp>

#include "nls/io.hpp"

namespace nls {

using nlohmann::json;

namespace {

void require_keys(const json& j, const std::string& where,
                  const std::set<std::string>& allowed,
                  const std::set<std::string>& required = {}) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError("unknown key '" + it.key() + "' in " + where);
    for (const auto& k : required)
        if (!j.count(k)) throw ConfigError(where + " requires key '" + k + "'");
}

double finite_number(const json& j, const std::string& where) {
    if (!j.is_number()) throw ConfigError(where + " must be a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(where + " must be finite");
    return v;
}

Rational rational_field(const json& j, const std::string& where) {
    if (j.is_string()) return Rational::parse(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<long long>(), 1);
    if (j.is_number()) return Rational::from_double(finite_number(j, where));
    throw ConfigError(where + " must be a number or a \"p/q\" string");
}

PotentialSpec parse_potential(const json& j) {
    require_keys(j, "model.potential", {"kind", "a"}, {"kind"});
    PotentialSpec p;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "zero") p.kind = PotentialKind::Zero;
    else if (kind == "harmonic") p.kind = PotentialKind::Harmonic;
    else if (kind == "saturating") p.kind = PotentialKind::Saturating;
    else throw ConfigError("unknown potential kind '" + kind + "'");
    if (j.count("a")) p.a = finite_number(j.at("a"), "model.potential.a");
    return p;
}

LocalSpec parse_local(const json& j) {
    require_keys(j, "model.local", {"kind", "b", "p", "mu", "nu", "p1", "p2"}, {"kind"});
    LocalSpec f;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "zero") {
        f.kind = LocalKind::Zero;
    } else if (kind == "power") {
        f.kind = LocalKind::Power;
        f.b = finite_number(j.at("b"), "model.local.b");
        f.p = rational_field(j.at("p"), "model.local.p");
    } else if (kind == "two_power") {
        f.kind = LocalKind::TwoPower;
        f.mu = finite_number(j.at("mu"), "model.local.mu");
        f.nu = finite_number(j.at("nu"), "model.local.nu");
        f.p1 = rational_field(j.at("p1"), "model.local.p1");
        f.p2 = rational_field(j.at("p2"), "model.local.p2");
    } else if (kind == "log_power") {
        f.kind = LocalKind::LogPower;
        f.b = finite_number(j.at("b"), "model.local.b");
        f.p = rational_field(j.at("p"), "model.local.p");
    } else {
        throw ConfigError("unknown local nonlinearity kind '" + kind + "'");
    }
    return f;
}

KernelSpec parse_kernel(const json& j) {
    require_keys(j, "model.kernel", {"kind", "a", "K", "K_inner"}, {"kind"});
    KernelSpec w;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "zero") w.kind = KernelKind::Zero;
    else if (kind == "inverse_power") w.kind = KernelKind::InversePower;
    else if (kind == "gaussian") w.kind = KernelKind::Gaussian;
    else if (kind == "saturating") w.kind = KernelKind::Saturating;
    else if (kind == "bridged_inverse_power") w.kind = KernelKind::BridgedInversePower;
    else throw ConfigError("unknown kernel kind '" + kind + "'");
    if (j.count("a")) w.a = finite_number(j.at("a"), "model.kernel.a");
    if (j.count("K")) w.K = finite_number(j.at("K"), "model.kernel.K");
    if (j.count("K_inner")) w.K_inner = finite_number(j.at("K_inner"), "model.kernel.K_inner");
    return w;
}

ModelSpec parse_model(const json& j) {
    require_keys(j, "model", {"dims", "potential", "local", "kernel", "l"}, {"dims"});
    ModelSpec m;
    m.dims = j.at("dims").get<int>();
    if (j.count("potential")) m.potential = parse_potential(j.at("potential"));
    if (j.count("local")) m.local = parse_local(j.at("local"));
    if (j.count("kernel")) m.kernel = parse_kernel(j.at("kernel"));
    if (j.count("l")) m.l = rational_field(j.at("l"), "model.l");
    validate_model(m);
    return m;
}

EvolveOptions parse_evolve(const json& j) {
    require_keys(j, "evolve",
                 {"dt_init", "dt_min", "t_final", "record_every", "blowup_gradient_factor",
                  "blowup_sigma_cap", "adapt", "adapt_tolerance", "snapshot_every"});
    EvolveOptions e;
    if (j.count("dt_init")) e.dt_init = finite_number(j.at("dt_init"), "evolve.dt_init");
    if (j.count("dt_min")) e.dt_min = finite_number(j.at("dt_min"), "evolve.dt_min");
    if (j.count("t_final")) e.t_final = finite_number(j.at("t_final"), "evolve.t_final");
    if (j.count("record_every"))
        e.record_every = finite_number(j.at("record_every"), "evolve.record_every");
    if (j.count("blowup_gradient_factor"))
        e.blowup_gradient_factor =
            finite_number(j.at("blowup_gradient_factor"), "evolve.blowup_gradient_factor");
    if (j.count("blowup_sigma_cap"))
        e.blowup_sigma_cap = finite_number(j.at("blowup_sigma_cap"), "evolve.blowup_sigma_cap");
    if (j.count("adapt")) e.adapt = j.at("adapt").get<bool>();
    if (j.count("adapt_tolerance"))
        e.adapt_tolerance = finite_number(j.at("adapt_tolerance"), "evolve.adapt_tolerance");
    if (j.count("snapshot_every"))
        e.snapshot_every = finite_number(j.at("snapshot_every"), "evolve.snapshot_every");
    e.validate();
    return e;
}

} // namespace

void validate_model(const ModelSpec& m) {
    if (m.dims < 1 || m.dims > 3) throw ConfigError("model.dims must be 1, 2 or 3");
    if (m.potential.a < 0.0) throw ConfigError("potential coefficient must be >= 0 (V >= 0)");
    const LocalSpec& f = m.local;
    auto positive = [](const Rational& p, const char* what) {
        if (!(Rational(0, 1) < p)) throw ConfigError(std::string(what) + " must be positive");
    };
    if (f.kind == LocalKind::Power || f.kind == LocalKind::LogPower) positive(f.p, "exponent p");
    if (f.kind == LocalKind::TwoPower) {
        positive(f.p1, "exponent p1");
        positive(f.p2, "exponent p2");
        if (!(f.p1 < f.p2)) throw ConfigError("two_power requires p1 < p2");
    }
    const KernelSpec& w = m.kernel;
    if (w.kind == KernelKind::InversePower && w.a != 0.0) {
        const double cap = std::min(4.0, static_cast<double>(m.dims));
        if (!(w.K > 0.0 && w.K < cap))
            throw ConfigError("inverse_power kernel requires 0 < K < min(4, N)");
    }
    if (w.kind == KernelKind::BridgedInversePower && w.a != 0.0) {
        if (!(w.K_inner > 2.0 && w.K_inner < 4.0 && w.K > w.K_inner))
            throw ConfigError("bridged kernel requires 2 < K_inner < 4 and K > K_inner");
    }
    if (m.l && !(Rational(0, 1) < *m.l)) throw ConfigError("model.l must be positive");
}

RunConfig RunConfig::parse_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    require_keys(j, "config",
                 {"command", "model", "grid", "initial", "omega", "evolve", "threshold",
                  "dichotomy", "sweep", "observe", "output_dir", "run_id", "seed"},
                 {"command", "model", "grid"});

    RunConfig c;
    const std::string cmd = j.at("command").get<std::string>();
    if (cmd == "simulate") c.command = Command::Simulate;
    else if (cmd == "groundstate") c.command = Command::Groundstate;
    else if (cmd == "threshold") c.command = Command::Threshold;
    else if (cmd == "classify") c.command = Command::Classify;
    else if (cmd == "dichotomy") c.command = Command::Dichotomy;
    else if (cmd == "sweep") c.command = Command::Sweep;
    else throw ConfigError("unknown command '" + cmd + "'");

    c.model = parse_model(j.at("model"));

    require_keys(j.at("grid"), "grid", {"extent", "points"}, {"extent", "points"});
    c.grid.extent = finite_number(j.at("grid").at("extent"), "grid.extent");
    c.grid.points = j.at("grid").at("points").get<std::size_t>();

    if (j.count("initial")) {
        const json& ji = j.at("initial");
        require_keys(ji, "initial", {"kind", "amplitude", "width", "quad_phase_sigma", "path"});
        if (ji.count("kind")) c.initial.kind = ji.at("kind").get<std::string>();
        if (c.initial.kind != "gaussian" && c.initial.kind != "snapshot" &&
            c.initial.kind != "ground_state")
            throw ConfigError("initial.kind must be gaussian, snapshot or ground_state");
        if (ji.count("amplitude"))
            c.initial.amplitude = finite_number(ji.at("amplitude"), "initial.amplitude");
        if (ji.count("width")) c.initial.width = finite_number(ji.at("width"), "initial.width");
        if (ji.count("quad_phase_sigma"))
            c.initial.quad_phase_sigma =
                finite_number(ji.at("quad_phase_sigma"), "initial.quad_phase_sigma");
        if (ji.count("path")) c.initial.path = ji.at("path").get<std::string>();
    }

    if (j.count("omega")) c.omega = finite_number(j.at("omega"), "omega");
    if (!(c.omega > 0.0)) throw ConfigError("omega must be positive");
    if (j.count("evolve")) c.evolve = parse_evolve(j.at("evolve"));

    if (j.count("threshold")) {
        const json& jt = j.at("threshold");
        require_keys(jt, "threshold",
                     {"which", "restarts", "descent_steps", "enforce_gate", "save_minimizer"});
        if (jt.count("which"))
            for (const auto& s : jt.at("which")) c.threshold.which.push_back(s.get<std::string>());
        for (const auto& s : c.threshold.which)
            if (s != "d_I" && s != "d_prime_I" && s != "d_N" && s != "d_M" && s != "d_II")
                throw ConfigError("unknown threshold '" + s + "'");
        if (jt.count("restarts")) c.threshold.restarts = jt.at("restarts").get<int>();
        if (jt.count("descent_steps"))
            c.threshold.descent_steps = jt.at("descent_steps").get<int>();
        if (jt.count("enforce_gate")) c.threshold.enforce_gate = jt.at("enforce_gate").get<bool>();
        if (jt.count("save_minimizer"))
            c.threshold.save_minimizer = jt.at("save_minimizer").get<bool>();
    }

    if (j.count("dichotomy")) {
        const json& jd = j.at("dichotomy");
        require_keys(jd, "dichotomy", {"amplitudes", "quad_phase_sigma", "quad_phase_min_c"},
                     {"amplitudes"});
        for (const auto& v : jd.at("amplitudes"))
            c.dichotomy.amplitudes.push_back(finite_number(v, "dichotomy.amplitudes[]"));
        if (jd.count("quad_phase_sigma"))
            c.dichotomy.quad_phase_sigma =
                finite_number(jd.at("quad_phase_sigma"), "dichotomy.quad_phase_sigma");
        if (jd.count("quad_phase_min_c"))
            c.dichotomy.quad_phase_min_c =
                finite_number(jd.at("quad_phase_min_c"), "dichotomy.quad_phase_min_c");
    }

    if (j.count("sweep")) {
        const json& js = j.at("sweep");
        require_keys(js, "sweep", {"command", "key", "values"}, {"command", "key", "values"});
        c.sweep.command = js.at("command").get<std::string>();
        if (c.sweep.command != "classify" && c.sweep.command != "simulate" &&
            c.sweep.command != "threshold")
            throw ConfigError("sweep.command must be classify, simulate or threshold");
        c.sweep.key = js.at("key").get<std::string>();
        for (const auto& v : js.at("values"))
            c.sweep.values.push_back(finite_number(v, "sweep.values[]"));
        if (c.sweep.values.size() > 10000) throw ConfigError("sweep grid exceeds 10^4 points");
    }

    if (j.count("observe")) c.observe = j.at("observe").get<bool>();
    if (j.count("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    if (j.count("run_id")) c.run_id = j.at("run_id").get<std::string>();
    if (j.count("seed")) c.seed = j.at("seed").get<std::uint64_t>();

    // grid construction validates extent/points; do it early for fail-fast
    make_grid(c.model.dims, c.grid.extent, c.grid.points);
    return c;
}

RunConfig RunConfig::parse_file(const std::string& path) {
    return parse_text(read_text_file(path));
}

} // namespace nls
