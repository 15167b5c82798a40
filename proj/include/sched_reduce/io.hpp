#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "model.hpp"
#include "reductions.hpp"
#include "rounding.hpp"

// JSON file formats. Every document is an object with a "kind" field;
// rationals are "p/q" strings and big integers are decimal strings.

namespace sched_reduce::io {

using Json = nlohmann::ordered_json;

namespace detail {

[[noreturn]] inline void bad(const std::string& what) { fail(ErrorCode::Parse, what); }

inline const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing field '") + key + "'");
  return j.at(key);
}

template <class T>
T get(const Json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    bad(std::string("field '") + key + "': " + e.what());
  }
}

inline Rational rational(const Json& j, const char* key) {
  try {
    return parse_rational(get<std::string>(j, key));
  } catch (const std::invalid_argument& e) {
    bad(std::string("field '") + key + "': " + e.what());
  }
}

inline BigInt big(const Json& j, const char* key) {
  const auto text = get<std::string>(j, key);
  try {
    return BigInt(text);
  } catch (const std::exception&) {
    bad(std::string("field '") + key + "': not an integer: " + text);
  }
}

inline void expect_kind(const Json& j, const std::string& kind) {
  const auto found = get<std::string>(j, "kind");
  if (found != kind) bad("expected kind '" + kind + "', found '" + found + "'");
}

/// Constructors throw InvalidInstance; inside a reader that is a parse error.
template <class F>
auto build(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Parse) throw;
    bad(e.what());
  }
}

}  // namespace detail

inline Json to_json(const PrecedenceDag& dag) {
  Json edges = Json::array();
  for (const Edge& e : dag.edges()) edges.push_back({e.from, e.to});
  return Json{{"node_count", dag.node_count()}, {"edges", edges}};
}

inline PrecedenceDag dag_from_json(const Json& j) {
  const int count = detail::get<int>(j, "node_count");
  std::vector<Edge> edges;
  for (const auto& e : detail::field(j, "edges")) {
    if (!e.is_array() || e.size() != 2) detail::bad("edges must be [from, to] pairs");
    edges.push_back({e[0].get<int>(), e[1].get<int>()});
  }
  return detail::build([&] { return PrecedenceDag(count, std::move(edges)); });
}

// --- umps ------------------------------------------------------------------

inline Json umps_body(const UmpsInstance& inst) {
  return Json{{"n", inst.n()},
              {"m", inst.m()},
              {"lengths", inst.lengths()},
              {"home", inst.homes()},
              {"dag", to_json(inst.dag())}};
}

inline Json to_json(const UmpsInstance& inst) {
  Json j{{"kind", "umps"}};
  j.update(umps_body(inst));
  return j;
}

inline UmpsInstance umps_from_body(const Json& j) {
  const int n = detail::get<int>(j, "n");
  auto lengths = detail::get<std::vector<std::int64_t>>(j, "lengths");
  auto home = detail::get<std::vector<int>>(j, "home");
  if (static_cast<int>(lengths.size()) != n) detail::bad("lengths has the wrong size");
  return detail::build([&] {
    return UmpsInstance(detail::get<int>(j, "m"), std::move(lengths), std::move(home),
                        dag_from_json(detail::field(j, "dag")));
  });
}

inline UmpsInstance umps_from_json(const Json& j) {
  detail::expect_kind(j, "umps");
  return umps_from_body(j);
}

// --- jobshop ---------------------------------------------------------------

inline Json to_json(const JobShopInstance& js) {
  Json jobs = Json::array();
  for (const auto& chain : js.jobs()) {
    Json ops = Json::array();
    for (const Operation& op : chain) ops.push_back(Json{{"machine", op.machine}, {"duration", op.duration}});
    jobs.push_back(ops);
  }
  return Json{{"kind", "jobshop"}, {"machine_count", js.machine_count()}, {"jobs", jobs}};
}

inline JobShopInstance jobshop_from_json(const Json& j) {
  detail::expect_kind(j, "jobshop");
  std::vector<std::vector<Operation>> chains;
  for (const auto& chain : detail::field(j, "jobs")) {
    std::vector<Operation> ops;
    for (const auto& op : chain) {
      ops.push_back({detail::get<int>(op, "machine"), detail::get<std::int64_t>(op, "duration")});
    }
    chains.push_back(std::move(ops));
  }
  return detail::build([&] { return JobShopInstance(detail::get<int>(j, "machine_count"), std::move(chains)); });
}

// --- commdelay -------------------------------------------------------------

inline Json to_json(const CommDelayInstance& inst) {
  Json delays = Json::array();
  for (std::size_t k = 0; k < inst.delays().size(); ++k) {
    const Edge& e = inst.dag().edges()[k];
    delays.push_back({e.from, e.to, inst.delays()[k]});
  }
  Json machines = inst.machines().unbounded ? Json("Unbounded") : Json{{"Bounded", inst.machines().count}};
  return Json{{"kind", "commdelay"}, {"n_total", inst.n_total()}, {"lengths", inst.lengths()},
              {"delays", delays},    {"dag", to_json(inst.dag())}, {"machines", machines}};
}

inline CommDelayInstance commdelay_from_json(const Json& j) {
  detail::expect_kind(j, "commdelay");
  auto dag = dag_from_json(detail::field(j, "dag"));
  std::map<Edge, std::int64_t> by_edge;
  for (const auto& d : detail::field(j, "delays")) {
    if (!d.is_array() || d.size() != 3) detail::bad("delays must be [from, to, delay] triples");
    by_edge[{d[0].get<int>(), d[1].get<int>()}] = d[2].get<std::int64_t>();
  }
  if (by_edge.size() != dag.edges().size()) detail::bad("need exactly one delay per dag edge");
  std::vector<std::int64_t> delays;
  for (const Edge& e : dag.edges()) {
    auto it = by_edge.find(e);
    if (it == by_edge.end()) detail::bad("edge without a delay");
    delays.push_back(it->second);
  }
  const Json& mj = detail::field(j, "machines");
  MachinePool pool;
  if (mj.is_string() && mj.get<std::string>() == "Unbounded") {
    pool = MachinePool::Unbounded();
  } else if (mj.is_object() && mj.contains("Bounded")) {
    pool = MachinePool::Bounded(mj.at("Bounded").get<int>());
  } else {
    detail::bad("machines must be \"Unbounded\" or {\"Bounded\": m}");
  }
  auto lengths = detail::get<std::vector<std::int64_t>>(j, "lengths");
  if (static_cast<int>(lengths.size()) != detail::get<int>(j, "n_total")) detail::bad("lengths has the wrong size");
  return detail::build([&] { return CommDelayInstance(std::move(lengths), std::move(dag), std::move(delays), pool); });
}

// --- related_grouped -------------------------------------------------------

inline Json to_json(const GroupedRelatedInstance& inst) {
  Json jobs = Json::array();
  for (const auto& g : inst.job_groups()) {
    jobs.push_back(Json{{"multiplicity", g.multiplicity.str()}, {"length", g.length.str()}, {"origin_job", g.origin_job}});
  }
  Json machines = Json::array();
  for (const auto& g : inst.machine_groups()) {
    machines.push_back(Json{{"multiplicity", g.multiplicity.str()}, {"speed", g.speed.str()}});
  }
  return Json{{"kind", "related_grouped"},
              {"job_groups", jobs},
              {"machine_groups", machines},
              {"group_dag", to_json(inst.group_dag())}};
}

inline GroupedRelatedInstance related_grouped_from_json(const Json& j) {
  detail::expect_kind(j, "related_grouped");
  std::vector<JobGroup> jobs;
  for (const auto& g : detail::field(j, "job_groups")) {
    jobs.push_back({detail::big(g, "multiplicity"), detail::big(g, "length"), detail::get<int>(g, "origin_job")});
  }
  std::vector<MachineGroup> machines;
  for (const auto& g : detail::field(j, "machine_groups")) {
    machines.push_back({detail::big(g, "multiplicity"), detail::big(g, "speed")});
  }
  return detail::build([&] {
    return GroupedRelatedInstance(std::move(jobs), std::move(machines), dag_from_json(detail::field(j, "group_dag")));
  });
}

// --- kpartite --------------------------------------------------------------

inline Json to_json(const KPartiteInstance& g, const KPartiteYesCertificate* cert = nullptr) {
  Json layers = Json::array();
  for (const auto& layer : g.all_edges()) {
    Json edges = Json::array();
    for (const auto& [a, b] : layer) edges.push_back({a, b});
    layers.push_back(edges);
  }
  Json j{{"kind", "kpartite"}, {"k", g.k()},
         {"n", g.n()},         {"edges", layers},
         {"Q", g.q()},         {"eps", to_string(g.eps())},
         {"delta", to_string(g.delta())}};
  if (cert) j["certificate"] = Json{{"partition", cert->cells}};
  return j;
}

struct KPartiteFile {
  KPartiteInstance instance;
  std::optional<KPartiteYesCertificate> certificate;
};

inline KPartiteFile kpartite_from_json(const Json& j) {
  detail::expect_kind(j, "kpartite");
  std::vector<std::vector<KPartiteInstance::LayerEdge>> edges;
  for (const auto& layer : detail::field(j, "edges")) {
    std::vector<KPartiteInstance::LayerEdge> list;
    for (const auto& e : layer) {
      if (!e.is_array() || e.size() != 2) detail::bad("k-partite edges must be [a, b] pairs");
      list.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    edges.push_back(std::move(list));
  }
  KPartiteFile out{detail::build([&] {
                     return KPartiteInstance(detail::get<int>(j, "k"), detail::get<int>(j, "n"), std::move(edges),
                                             detail::get<int>(j, "Q"), detail::rational(j, "eps"),
                                             detail::rational(j, "delta"));
                   }),
                   std::nullopt};
  if (j.contains("certificate")) {
    KPartiteYesCertificate cert;
    cert.cells = detail::get<std::vector<std::vector<std::vector<int>>>>(j.at("certificate"), "partition");
    out.certificate = std::move(cert);
  }
  return out;
}

// --- schedule --------------------------------------------------------------

inline Json to_json(const Schedule& sched) {
  Json entries = Json::array();
  for (const auto& [job, e] : sched.entries) {
    entries.push_back(
        Json{{"job", job}, {"machine", e.machine}, {"start", to_string(e.start)}, {"end", to_string(e.end)}});
  }
  Json j{{"kind", "schedule"}, {"entries", entries}};
  j["horizon"] = sched.empty() ? Json(nullptr) : Json(to_string(makespan(sched)));
  return j;
}

inline Schedule schedule_from_json(const Json& j) {
  detail::expect_kind(j, "schedule");
  Schedule sched;
  for (const auto& e : detail::field(j, "entries")) {
    const JobId job = detail::get<int>(e, "job");
    if (sched.entries.count(job)) detail::bad("job " + std::to_string(job) + " listed twice");
    sched.place(job, detail::get<int>(e, "machine"), detail::rational(e, "start"), detail::rational(e, "end"));
  }
  return sched;
}

// --- fractional ------------------------------------------------------------

inline Json to_json(const FractionalSchedule& fs) {
  Json mass = Json::array();
  for (JobId l = 1; l <= fs.job_count(); ++l) {
    Json row = Json::array();
    for (int t = 1; t <= fs.horizon(); ++t) row.push_back(to_string(fs.mass(l, t)));
    mass.push_back(row);
  }
  return Json{{"kind", "fractional"},
              {"umps", umps_body(fs.umps())},
              {"horizon", fs.horizon()},
              {"gamma", to_string(fs.gamma())},
              {"mass", mass}};
}

inline FractionalSchedule fractional_from_json(const Json& j) {
  detail::expect_kind(j, "fractional");
  const UmpsInstance umps = umps_from_body(detail::field(j, "umps"));
  const int horizon = detail::get<int>(j, "horizon");
  return detail::build([&] {
    FractionalSchedule fs(umps, horizon, detail::rational(j, "gamma"));
    const Json& rows = detail::field(j, "mass");
    if (!rows.is_array() || static_cast<int>(rows.size()) != umps.n()) detail::bad("mass needs one row per job");
    for (JobId l = 1; l <= umps.n(); ++l) {
      const Json& row = rows[l - 1];
      if (!row.is_array() || static_cast<int>(row.size()) != horizon) detail::bad("mass row has the wrong length");
      for (int t = 1; t <= horizon; ++t) {
        try {
          fs.set_mass(l, t, parse_rational(row[t - 1].get<std::string>()));
        } catch (const std::invalid_argument& e) {
          detail::bad(e.what());
        }
      }
    }
    return fs;
  });
}

// --- reduction sidecars ----------------------------------------------------

inline Json to_json(const CommDelayReductionArtifact& art) {
  return Json{{"kind", "artifact"},
              {"reduction", "umps_to_commdelay"},
              {"source", to_json(art.source)},
              {"c_infinity", art.c_infinity},
              {"dummy_ids", art.dummy_ids},
              {"origin", art.origin}};
}

inline Json to_json(const RelatedReductionArtifact& art) {
  return Json{{"kind", "artifact"},
              {"reduction", "umps_to_related"},
              {"source", to_json(art.source)},
              {"kappa", art.kappa.str()},
              {"kappa_overridden", art.kappa_overridden},
              {"soundness_guaranteed", art.soundness_guaranteed},
              {"origin", art.origin},
              {"machine_group_of", art.machine_group_of}};
}

inline Json to_json(const JobShopEmbedding& emb, const JobShopInstance& source) {
  Json origin = Json::array();
  for (const auto& [job, op] : emb.origin) origin.push_back({job, op});
  return Json{{"kind", "artifact"}, {"reduction", "jobshop_to_umps"}, {"source", to_json(source)}, {"origin", origin}};
}

inline Json kpartite_artifact(const KPartiteInstance& g) {
  Json origin = Json::array();
  for (int layer = 1; layer <= g.k(); ++layer) {
    for (int v = 1; v <= g.n(); ++v) origin.push_back({layer, v});
  }
  return Json{{"kind", "artifact"}, {"reduction", "kpartite_to_umps"}, {"source", to_json(g)}, {"origin", origin}};
}

/// Rebuilds the artifact from its recorded source and checks that the
/// recorded tables agree.
inline CommDelayReductionArtifact commdelay_artifact_from_json(const Json& j) {
  detail::expect_kind(j, "artifact");
  if (detail::get<std::string>(j, "reduction") != "umps_to_commdelay") detail::bad("not a umps_to_commdelay artifact");
  auto art = umps_to_commdelay(umps_from_json(detail::field(j, "source")));
  if (detail::get<std::int64_t>(j, "c_infinity") != art.c_infinity ||
      detail::get<std::vector<int>>(j, "dummy_ids") != art.dummy_ids ||
      detail::get<std::vector<int>>(j, "origin") != art.origin) {
    detail::bad("artifact tables disagree with its source instance");
  }
  return art;
}

inline RelatedReductionArtifact related_artifact_from_json(const Json& j) {
  detail::expect_kind(j, "artifact");
  if (detail::get<std::string>(j, "reduction") != "umps_to_related") detail::bad("not a umps_to_related artifact");
  const bool overridden = detail::get<bool>(j, "kappa_overridden");
  const BigInt kappa = detail::big(j, "kappa");
  auto art = umps_to_related(umps_from_json(detail::field(j, "source")),
                             overridden ? std::optional<BigInt>(kappa) : std::nullopt);
  if (art.kappa != kappa || detail::get<std::vector<int>>(j, "origin") != art.origin ||
      detail::get<std::vector<int>>(j, "machine_group_of") != art.machine_group_of) {
    detail::bad("artifact tables disagree with its source instance");
  }
  return art;
}

// --- files -----------------------------------------------------------------

/// Two-space indentation plus a trailing newline, so equal values give
/// byte-identical files.
inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

inline Json parse(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    detail::bad(e.what());
  }
}

inline Json read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

inline void write_file(const std::string& path, const Json& j) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot write " + path);
  out << dump(j);
  if (!out) fail(ErrorCode::Io, "write to " + path + " failed");
}

inline std::string kind_of(const Json& j) { return detail::get<std::string>(j, "kind"); }

}  // namespace sched_reduce::io
