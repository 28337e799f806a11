#include "core/plan.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "core/observables.hpp"
#include "json.hpp"

namespace rfim {

using nlohmann::json;

namespace {

const std::set<std::string> kObservableNames = {
    "overlap-variance", "gg-residual",   "delta-self-averaging",
    "q-consistency",    "fkg-scan",      "ibp-suite",
    "var-fn-scaling"};

std::string dynamics_name(Dynamics d) {
  return d == Dynamics::glauber ? "glauber" : "metropolis";
}
std::string start_name(StartMode s) {
  return s == StartMode::all_up ? "all-up" : "random";
}

std::int64_t cell_volume(int d, int n) {
  std::int64_t v = 1;
  for (int k = 0; k < d; ++k) {
    if (v > (std::int64_t{1} << 40) / n) return std::int64_t{1} << 40;
    v *= n;
  }
  return v;
}

}  // namespace

bool Plan::wants(const std::string& observable) const {
  for (const auto& o : observables)
    if (o.name == observable) return true;
  return false;
}

std::string resolve_engine(const Plan& plan, int n) {
  if (plan.engine_kind != "auto") return plan.engine_kind;
  return cell_volume(plan.d, n) <= plan.enumeration_cap ? "exact" : "mcmc";
}

std::string Plan::to_json() const {
  json j;
  j["name"] = name;
  j["grid"] = {{"d", d}, {"n", n}, {"beta", beta}, {"h", h}};
  json profs = json::array();
  for (const auto& p : profiles) profs.push_back(json::parse(p.to_json()));
  json dst = json::array();
  for (const auto& z : dists) dst.push_back(json::parse(z.to_json()));
  j["disorder"] = {{"profiles", profs},
                   {"dists", dst},
                   {"seeds", {{"base", seed_base}, {"count", seed_count}}}};
  j["engine"] = {{"kind", engine_kind},
                 {"enumeration_cap", enumeration_cap},
                 {"mcmc",
                  {{"sweeps", mcmc.sweeps},
                   {"burn_in", mcmc.burn_in},
                   {"thinning", mcmc.thinning},
                   {"dynamics", dynamics_name(mcmc.dynamics)},
                   {"start", start_name(mcmc.start)}}}};
  json obs = json::array();
  for (const auto& o : observables) {
    json oj;
    oj["name"] = o.name;
    if (o.name == "gg-residual") {
      oj["m"] = o.m;
      oj["f"] = o.f;
    }
    obs.push_back(oj);
  }
  j["observables"] = obs;
  j["output"] = {{"formats", formats}};
  j["bound_factor"] = bound_factor;
  return j.dump(2);
}

ValidationResult validate_plan(const std::string& text) {
  ValidationResult out;
  auto diag = [&](const std::string& path, const std::string& message) {
    out.diagnostics.push_back({path, message});
  };

  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    diag("$", std::string("not valid json: ") + e.what());
    return out;
  }
  if (!j.is_object()) {
    diag("$", "plan must be a json object");
    return out;
  }

  Plan plan;
  plan.name = j.value("name", std::string{});

  // grid
  if (!j.contains("grid") || !j["grid"].is_object()) {
    diag("grid", "required object with keys d, n, beta, h");
  } else {
    const auto& g = j["grid"];
    auto number_list = [&](const char* key, auto& dest, auto convert) {
      if (!g.contains(key)) {
        diag(std::string("grid.") + key, "required");
        return;
      }
      const auto& v = g[key];
      if (v.is_array()) {
        for (const auto& e : v) {
          if (!e.is_number()) {
            diag(std::string("grid.") + key, "entries must be numbers");
            return;
          }
          dest.push_back(convert(e));
        }
      } else if (v.is_number()) {
        dest.push_back(convert(v));
      } else {
        diag(std::string("grid.") + key, "must be a number or list of numbers");
      }
    };
    if (g.contains("d") && g["d"].is_number_integer())
      plan.d = g["d"].get<int>();
    else
      diag("grid.d", "required integer");
    number_list("n", plan.n, [](const json& e) { return e.get<int>(); });
    number_list("beta", plan.beta, [](const json& e) { return e.get<double>(); });
    number_list("h", plan.h, [](const json& e) { return e.get<double>(); });
    if (plan.d < 1) diag("grid.d", "dimension must be >= 1");
    for (std::size_t i = 0; i < plan.n.size(); ++i)
      if (plan.n[i] < 1)
        diag("grid.n[" + std::to_string(i) + "]", "side length must be >= 1");
    for (std::size_t i = 0; i < plan.beta.size(); ++i)
      if (!(plan.beta[i] > 0))
        diag("grid.beta[" + std::to_string(i) + "]",
             "inverse temperature must be > 0");
    for (std::size_t i = 0; i < plan.h.size(); ++i)
      if (!(plan.h[i] > 0))
        diag("grid.h[" + std::to_string(i) + "]", "field strength must be > 0");
    if (plan.n.empty()) diag("grid.n", "at least one size required");
    if (plan.beta.empty()) diag("grid.beta", "at least one value required");
    if (plan.h.empty()) diag("grid.h", "at least one value required");
  }

  // disorder
  if (!j.contains("disorder") || !j["disorder"].is_object()) {
    diag("disorder", "required object with profiles, dists, seeds");
  } else {
    const auto& d = j["disorder"];
    json profs = json::array();
    if (d.contains("profiles"))
      profs = d["profiles"];
    else if (d.contains("profile"))
      profs.push_back(d["profile"]);
    if (!profs.is_array() || profs.empty()) {
      diag("disorder.profiles", "at least one profile required");
    } else {
      for (std::size_t i = 0; i < profs.size(); ++i) {
        try {
          plan.profiles.push_back(FieldProfile::parse(profs[i].dump()));
        } catch (const Error& e) {
          diag("disorder.profiles[" + std::to_string(i) + "]", e.what());
        }
      }
    }
    json dists = json::array();
    if (d.contains("dists"))
      dists = d["dists"];
    else if (d.contains("dist"))
      dists.push_back(d["dist"]);
    if (!dists.is_array() || dists.empty()) {
      diag("disorder.dists", "at least one distribution required");
    } else {
      for (std::size_t i = 0; i < dists.size(); ++i) {
        try {
          plan.dists.push_back(ZetaDistribution::parse(dists[i].dump()));
        } catch (const Error& e) {
          diag("disorder.dists[" + std::to_string(i) + "]", e.what());
        }
      }
    }
    if (!d.contains("seeds") || !d["seeds"].is_object()) {
      diag("disorder.seeds", "required object {base, count}");
    } else {
      plan.seed_base = d["seeds"].value("base", std::uint64_t{1});
      plan.seed_count = d["seeds"].value("count", 1);
      if (plan.seed_count < 1) diag("disorder.seeds.count", "must be >= 1");
    }
  }

  // engine
  if (j.contains("engine")) {
    const auto& e = j["engine"];
    if (!e.is_object()) {
      diag("engine", "must be an object");
    } else {
      plan.engine_kind = e.value("kind", std::string("auto"));
      plan.enumeration_cap = e.value("enumeration_cap", kDefaultEnumerationCap);
      if (plan.engine_kind != "exact" && plan.engine_kind != "transfer-matrix" &&
          plan.engine_kind != "mcmc" && plan.engine_kind != "auto")
        diag("engine.kind",
             "must be one of exact, transfer-matrix, mcmc, auto");
      if (plan.enumeration_cap < 1 || plan.enumeration_cap > 30)
        diag("engine.enumeration_cap", "must lie in [1, 30]");
      if (e.contains("mcmc")) {
        const auto& m = e["mcmc"];
        plan.mcmc.sweeps = m.value("sweeps", plan.mcmc.sweeps);
        plan.mcmc.burn_in = m.value("burn_in", plan.mcmc.burn_in);
        plan.mcmc.thinning = m.value("thinning", plan.mcmc.thinning);
        const std::string dyn = m.value("dynamics", std::string("glauber"));
        if (dyn == "glauber")
          plan.mcmc.dynamics = Dynamics::glauber;
        else if (dyn == "metropolis")
          plan.mcmc.dynamics = Dynamics::metropolis;
        else
          diag("engine.mcmc.dynamics", "must be glauber or metropolis");
        const std::string st = m.value("start", std::string("all-up"));
        if (st == "all-up")
          plan.mcmc.start = StartMode::all_up;
        else if (st == "random")
          plan.mcmc.start = StartMode::random;
        else
          diag("engine.mcmc.start", "must be all-up or random");
        try {
          plan.mcmc.validate();
        } catch (const Error& err) {
          diag("engine.mcmc", err.what());
        }
      }
    }
  }

  // observables
  if (!j.contains("observables") || !j["observables"].is_array() ||
      j["observables"].empty()) {
    diag("observables", "required non-empty list");
  } else {
    const auto& obs = j["observables"];
    for (std::size_t i = 0; i < obs.size(); ++i) {
      const std::string path = "observables[" + std::to_string(i) + "]";
      ObservableSpec spec;
      if (obs[i].is_string()) {
        spec.name = obs[i].get<std::string>();
      } else if (obs[i].is_object() && obs[i].contains("name")) {
        spec.name = obs[i]["name"].get<std::string>();
        spec.m = obs[i].value("m", 3);
        spec.f = obs[i].value("f", std::string("R23"));
      } else {
        diag(path, "must be a name or an object with 'name'");
        continue;
      }
      if (kObservableNames.count(spec.name) == 0) {
        diag(path, "unknown observable '" + spec.name + "'");
        continue;
      }
      if (spec.name == "gg-residual") {
        if (spec.m < 2) diag(path + ".m", "gg-residual requires m >= 2");
        try {
          const auto f = parse_overlap_function(spec.f);
          if (replicas_needed(f) > spec.m)
            diag(path + ".f",
                 "f reads replica labels beyond m = " + std::to_string(spec.m));
        } catch (const Error& e) {
          diag(path + ".f", e.what());
        }
      }
      plan.observables.push_back(spec);
    }
  }

  // output
  if (j.contains("output") && j["output"].is_object()) {
    if (j["output"].contains("formats")) {
      plan.formats.clear();
      for (const auto& f : j["output"]["formats"]) {
        const std::string name = f.get<std::string>();
        if (name != "csv" && name != "json")
          diag("output.formats", "supported formats are csv and json");
        else
          plan.formats.push_back(name);
      }
    }
  }
  plan.bound_factor = j.value("bound_factor", 4.0);
  if (!(plan.bound_factor > 1.0)) diag("bound_factor", "must be > 1");

  // capability checks per cell
  if (out.diagnostics.empty()) {
    for (std::size_t i = 0; i < plan.n.size(); ++i) {
      const int n = plan.n[i];
      const std::int64_t vol = cell_volume(plan.d, n);
      const std::string cell =
          "cell (d=" + std::to_string(plan.d) + ", n=" + std::to_string(n) + ")";
      const std::string engine = resolve_engine(plan, n);
      if (engine == "exact" && vol > plan.enumeration_cap)
        diag("grid.n[" + std::to_string(i) + "]",
             cell + " needs " + std::to_string(vol) +
                 " spins, above the enumeration cap " +
                 std::to_string(plan.enumeration_cap));
      if (engine == "transfer-matrix") {
        if (plan.d != 1)
          diag("engine.kind", "transfer-matrix engine requires d = 1");
        for (const auto& o : plan.observables)
          if (o.name != "var-fn-scaling" && o.name != "q-consistency" &&
              o.name != "ibp-suite")
            diag("observables",
                 "observable '" + o.name + "' is not available on the "
                 "transfer-matrix engine (" + cell + ")");
      }
      if (engine == "mcmc") {
        for (const auto& o : plan.observables) {
          if (o.name == "fkg-scan")
            diag("observables",
                 "fkg-scan needs the exact engine; " + cell +
                     " resolves to mcmc");
          if ((o.name == "q-consistency" || o.name == "var-fn-scaling" ||
               o.name == "delta-self-averaging") &&
              plan.d != 1)
            diag("observables",
                 "observable '" + o.name + "' needs free-energy access, which "
                 "mcmc cells only have on d = 1 chains (" + cell + ")");
        }
      }
    }
  }

  if (out.diagnostics.empty()) out.plan = std::move(plan);
  return out;
}

std::string diagnostics_to_json(const std::vector<Diagnostic>& diags) {
  json arr = json::array();
  for (const auto& d : diags) arr.push_back({{"path", d.path}, {"message", d.message}});
  return arr.dump(2);
}

}  // namespace rfim
