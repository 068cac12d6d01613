#pragma once

// JSON schemas for set systems, distributions, scenarios, and result
// reports, plus the CSV row layout consumed by spreadsheet tooling. Parsing
// failures and semantically invalid inputs both surface as schema_error;
// contract_error stays reserved for violations raised during evaluation.

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rmmb/counterexample.hpp"
#include "rmmb/errors.hpp"
#include "rmmb/mechanism.hpp"
#include "rmmb/scenario.hpp"
#include "rmmb/set_system.hpp"

namespace rmmb {

inline nlohmann::json elemset_to_json(ElemSet s) {
  nlohmann::json arr = nlohmann::json::array();
  for (ElementId e : s.to_vector()) arr.push_back(e);
  return arr;
}

inline const char* mechanism_name(Mechanism m) {
  return m == Mechanism::Vcg ? "vcg" : "myeropt";
}

inline Mechanism mechanism_from_name(const std::string& name) {
  if (name == "myeropt") return Mechanism::MyerOPT;
  if (name == "vcg") return Mechanism::Vcg;
  throw schema_error("unknown mechanism '" + name + "'");
}

inline nlohmann::json system_to_json(const SetSystem& s) {
  nlohmann::json j;
  j["n"] = s.ground_size();
  switch (s.kind()) {
    case SetSystem::Kind::Uniform:
      j["kind"] = "uniform";
      j["k"] = s.uniform_k();
      break;
    case SetSystem::Kind::Graphic: {
      j["kind"] = "graphic";
      j["vertices"] = s.graphic_vertices();
      nlohmann::json edges = nlohmann::json::array();
      for (auto [u, v] : s.graphic_edges()) edges.push_back({u, v});
      j["edges"] = edges;
      break;
    }
    case SetSystem::Kind::Transversal:
      j["kind"] = "transversal";
      j["adjacency"] = s.transversal_adjacency();
      j["n_right"] = s.transversal_right_size();
      break;
    case SetSystem::Kind::Explicit: {
      j["kind"] = "explicit";
      nlohmann::json sets = nlohmann::json::array();
      for (ElemSet m : s.maximal_independent_sets())
        sets.push_back(elemset_to_json(m));
      j["independent_sets"] = sets;
      j["maximal_only"] = true;
      break;
    }
  }
  return j;
}

inline SetSystem system_from_json(const nlohmann::json& j) {
  try {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "uniform")
      return SetSystem::uniform(j.at("n").get<int>(), j.at("k").get<int>());
    if (kind == "graphic") {
      std::vector<std::pair<int, int>> edges;
      for (const auto& e : j.at("edges"))
        edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
      return SetSystem::graphic(j.at("vertices").get<int>(), edges);
    }
    if (kind == "transversal")
      return SetSystem::transversal(
          j.at("adjacency").get<std::vector<std::vector<int>>>(),
          j.at("n_right").get<int>());
    if (kind == "explicit") {
      std::vector<ElemSet> family;
      for (const auto& set : j.at("independent_sets")) {
        ElemSet s;
        for (const auto& e : set) s = s.with(e.get<int>());
        family.push_back(s);
      }
      return SetSystem::explicit_family(j.at("n").get<int>(), family,
                                        j.value("maximal_only", false));
    }
    throw schema_error("unknown set-system kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw schema_error(std::string("invalid set system: ") + e.what());
  } catch (const contract_error& e) {
    throw schema_error(std::string("invalid set system: ") + e.what());
  }
}

inline nlohmann::json distribution_to_json(const ValueDistribution& d) {
  nlohmann::json j;
  switch (d.kind()) {
    case ValueDistribution::Kind::Uniform:
      j["kind"] = "uniform";
      j["lo"] = d.lo();
      j["hi"] = d.hi();
      break;
    case ValueDistribution::Kind::ParetoLike:
      j["kind"] = "pareto_like";
      j["n_param"] = d.n_param();
      break;
    case ValueDistribution::Kind::PointMass:
      j["kind"] = "point_mass";
      j["value"] = d.support_values().front();
      break;
    case ValueDistribution::Kind::Discrete:
      j["kind"] = "discrete";
      j["support"] = d.support_values();
      j["probs"] = d.support_probs();
      break;
  }
  return j;
}

inline ValueDistribution distribution_from_json(const nlohmann::json& j) {
  try {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "uniform")
      return ValueDistribution::uniform(j.at("lo").get<double>(),
                                        j.at("hi").get<double>());
    if (kind == "pareto_like")
      return ValueDistribution::pareto_like(j.at("n_param").get<double>());
    if (kind == "point_mass")
      return ValueDistribution::point_mass(j.at("value").get<double>());
    if (kind == "discrete")
      return ValueDistribution::discrete(
          j.at("support").get<std::vector<double>>(),
          j.at("probs").get<std::vector<double>>());
    throw schema_error("unknown distribution kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw schema_error(std::string("invalid distribution: ") + e.what());
  } catch (const contract_error& e) {
    throw schema_error(std::string("invalid distribution: ") + e.what());
  }
}

inline nlohmann::json scenario_to_json(const Scenario& s) {
  nlohmann::json j;
  if (!s.id().empty()) j["id"] = s.id();
  j["market"] = system_to_json(s.market());
  nlohmann::json bidders = nlohmann::json::array();
  for (const BidderSpec& b : s.bidders()) {
    nlohmann::json jb;
    jb["dist"] = distribution_to_json(b.specified);
    jb["color"] = b.color == Color::Green ? "green" : "red";
    if (b.fixed_bid) jb["red_behavior"] = {{"fixed_bid", *b.fixed_bid}};
    if (b.true_dist)
      jb["red_behavior"] = {{"true_dist", distribution_to_json(*b.true_dist)}};
    bidders.push_back(jb);
  }
  j["bidders"] = bidders;
  return j;
}

inline Scenario scenario_from_json(const nlohmann::json& j) {
  try {
    SetSystem market = system_from_json(j.at("market"));
    std::vector<BidderSpec> bidders;
    for (const auto& jb : j.at("bidders")) {
      BidderSpec b{distribution_from_json(jb.at("dist")), Color::Green, {}, {}};
      std::string color = jb.at("color").get<std::string>();
      if (color == "red")
        b.color = Color::Red;
      else if (color != "green")
        throw schema_error("unknown bidder color '" + color + "'");
      if (jb.contains("red_behavior")) {
        const auto& rb = jb.at("red_behavior");
        if (rb.contains("fixed_bid"))
          b.fixed_bid = rb.at("fixed_bid").get<double>();
        if (rb.contains("true_dist"))
          b.true_dist = distribution_from_json(rb.at("true_dist"));
      }
      bidders.push_back(std::move(b));
    }
    return Scenario(std::move(market), std::move(bidders),
                    j.value("id", std::string{}));
  } catch (const nlohmann::json::exception& e) {
    throw schema_error(std::string("invalid scenario: ") + e.what());
  } catch (const contract_error& e) {
    throw schema_error(std::string("invalid scenario: ") + e.what());
  }
}

inline nlohmann::json outcome_to_json(const AuctionOutcome& o) {
  return {{"winners", elemset_to_json(o.winners)},
          {"payments", o.payments},
          {"virtuals", o.virtuals},
          {"revenue", o.revenue}};
}

inline nlohmann::json estimate_to_json(const RevenueEstimate& e) {
  return {{"mean", e.mean},
          {"std_error", e.std_error},
          {"trials", e.trials},
          {"exact", e.exact}};
}

inline nlohmann::json rmmb_report_to_json(const RmmbReport& rep) {
  return {{"scenario", rep.scenario_id},
          {"mechanism", mechanism_name(rep.mechanism)},
          {"rev_all", estimate_to_json(rep.rev_all)},
          {"rev_green", estimate_to_json(rep.rev_green)},
          {"margin", rep.margin},
          {"holds", rep.holds}};
}

namespace detail {

inline std::string csv_number(double x) {
  std::ostringstream out;
  out << std::setprecision(17) << x;
  return out.str();
}

}  // namespace detail

inline std::string rmmb_report_to_csv(const RmmbReport& rep) {
  std::ostringstream out;
  out << "scenario,mech,rev_all,se_all,rev_green,se_green,holds,margin\n"
      << rep.scenario_id << ',' << mechanism_name(rep.mechanism) << ','
      << detail::csv_number(rep.rev_all.mean) << ','
      << detail::csv_number(rep.rev_all.std_error) << ','
      << detail::csv_number(rep.rev_green.mean) << ','
      << detail::csv_number(rep.rev_green.std_error) << ','
      << (rep.holds ? "true" : "false") << ','
      << detail::csv_number(rep.margin) << '\n';
  return out.str();
}

inline nlohmann::json counterexample_report_to_json(
    const CounterexampleReport& rep) {
  return {{"witness_i", elemset_to_json(rep.witness_i)},
          {"witness_j", elemset_to_json(rep.witness_j)},
          {"green_set", elemset_to_json(rep.green_set)},
          {"red_set", elemset_to_json(rep.red_set)},
          {"n_param", rep.n_param},
          {"rev_all", rep.rev_all},
          {"rev_green", rep.rev_green},
          {"violated", rep.violated}};
}

inline nlohmann::json vcg_witness_to_json(const VcgWitness& w) {
  return {{"v", elemset_to_json(w.v)},
          {"x", w.x},
          {"rev_v", w.rev_v},
          {"rev_v_minus_x", w.rev_v_minus_x}};
}

inline nlohmann::json drs_rows_to_json(const std::vector<DrsCaseRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const DrsCaseRow& r : rows)
    arr.push_back({{"a", elemset_to_json(r.a)},
                   {"b", elemset_to_json(r.b)},
                   {"y", r.y},
                   {"x", r.x}});
  return arr;
}

inline std::string drs_rows_to_csv(const std::vector<DrsCaseRow>& rows) {
  auto set_cell = [](ElemSet s) {
    std::string cell;
    for (ElementId e : s.to_vector()) {
      if (!cell.empty()) cell += ' ';
      cell += std::to_string(e);
    }
    return cell;
  };
  std::ostringstream out;
  out << "A,B,y,x\n";
  for (const DrsCaseRow& r : rows)
    out << set_cell(r.a) << ',' << set_cell(r.b) << ',' << r.y << ',' << r.x
        << '\n';
  return out.str();
}

inline nlohmann::json ratio_rows_to_json(const std::vector<RatioRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const RatioRow& r : rows)
    arr.push_back({{"n_param", r.n_param},
                   {"rev_all", r.rev_all},
                   {"rev_green", r.rev_green},
                   {"ratio", r.ratio},
                   {"violated", r.violated}});
  return arr;
}

inline std::string ratio_rows_to_csv(const std::vector<RatioRow>& rows) {
  std::ostringstream out;
  out << "n_param,rev_all,rev_green,ratio,violated\n";
  for (const RatioRow& r : rows)
    out << detail::csv_number(r.n_param) << ','
        << detail::csv_number(r.rev_all) << ','
        << detail::csv_number(r.rev_green) << ','
        << detail::csv_number(r.ratio) << ','
        << (r.violated ? "true" : "false") << '\n';
  return out.str();
}

inline nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw schema_error("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw schema_error(path + ": " + e.what());
  }
}

inline Scenario load_scenario(const std::string& path) {
  return scenario_from_json(load_json_file(path));
}

inline SetSystem load_system(const std::string& path) {
  return system_from_json(load_json_file(path));
}

inline void save_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw schema_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace rmmb
