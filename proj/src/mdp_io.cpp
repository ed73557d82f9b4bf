#include "safe_explore/mdp_io.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "safe_explore/error.hpp"

namespace safe_explore {

using nlohmann::json;

TabularMDP parse_mdp_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    TabularMDP mdp(j.at("n_states").get<std::size_t>(), j.at("n_actions").get<std::size_t>());
    for (const auto& t : j.at("transitions")) {
      const auto s = t.at("s").get<StateId>();
      const auto a = t.at("a").get<ActionId>();
      if (s >= mdp.num_states() || a >= mdp.num_actions())
        throw FormatError("transition (s=" + std::to_string(s) + ", a=" + std::to_string(a) + ") out of range");
      for (const auto& b : t.at("branches"))
        mdp.add_branch(s, a, Branch{b.at("sp").get<StateId>(), b.at("p").get<double>(),
                                    b.value("r", 0.0), b.value("d", 0)});
    }
    for (const auto& s : j.value("terminal", json::array())) mdp.set_terminal_flag(s.get<StateId>(), true);
    return mdp;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed MDP JSON: ") + e.what());
  } catch (const std::out_of_range& e) {
    throw FormatError(std::string("malformed MDP JSON: ") + e.what());
  }
}

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TabularMDP load_mdp_unchecked(const std::filesystem::path& path) { return parse_mdp_json(slurp(path)); }

TabularMDP load_mdp(const std::filesystem::path& path) {
  TabularMDP mdp = load_mdp_unchecked(path);
  require_valid(mdp);
  return mdp;
}

std::string mdp_to_json(const TabularMDP& mdp) {
  json j;
  j["n_states"] = mdp.num_states();
  j["n_actions"] = mdp.num_actions();
  j["terminal"] = mdp.terminal_states();
  json transitions = json::array();
  for (StateId s = 0; s < mdp.num_states(); ++s) {
    for (ActionId a = 0; a < mdp.num_actions(); ++a) {
      json branches = json::array();
      for (const auto& b : mdp.branches(s, a))
        branches.push_back({{"sp", b.next}, {"p", b.probability}, {"r", b.reward}, {"d", b.damage}});
      transitions.push_back({{"s", s}, {"a", a}, {"branches", std::move(branches)}});
    }
  }
  j["transitions"] = std::move(transitions);
  return j.dump(1);
}

void save_mdp(const TabularMDP& mdp, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  out << mdp_to_json(mdp) << '\n';
}

}  // namespace safe_explore
