#include "mg/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mg {

void GameConfig::validate() const {
  if (agents < 1) throw std::invalid_argument("agents must be >= 1");
  if (memory < 1) throw std::invalid_argument("memory must be >= 1");
  if (memory > max_memory)
    throw std::invalid_argument("memory " + std::to_string(memory) +
                                " exceeds resource guard max_memory=" +
                                std::to_string(max_memory));
  if (strategies_per_agent < 2)
    throw std::invalid_argument("strategies_per_agent must be >= 2");
  if (steps < 1) throw std::invalid_argument("steps must be >= 1");
  const std::uint64_t space = strategy_space_size(memory);
  if (assignment == AssignmentMode::kDistinct &&
      static_cast<std::uint64_t>(strategies_per_agent) > space)
    throw std::invalid_argument(
        "strategies_per_agent exceeds the strategy space in distinct mode");
  if (initial_utilities == InitialUtilities::kExplicit) {
    if (explicit_utilities.size() != space)
      throw std::invalid_argument("explicit_utilities must list all " +
                                  std::to_string(space) + " strategies");
    for (const auto& [num, den] : explicit_utilities) {
      (void)num;
      if (den <= 0) throw std::invalid_argument("utility denominators must be positive");
    }
  }
  if (initial_history && *initial_history >= (1u << memory))
    throw std::invalid_argument("initial_history out of range");
}

std::string assignment_name(AssignmentMode m) {
  return m == AssignmentMode::kIndependent ? "independent" : "distinct";
}

std::string tracking_name(UtilityTracking t) {
  switch (t) {
    case UtilityTracking::kAuto: return "auto";
    case UtilityTracking::kFull: return "full";
    case UtilityTracking::kHeld: return "held";
  }
  return "?";
}

std::string initial_utilities_name(const GameConfig& c) {
  switch (c.initial_utilities) {
    case InitialUtilities::kAllZero: return "zero";
    case InitialUtilities::kPerturbed: return "perturbed";
    case InitialUtilities::kExplicit: {
      std::ostringstream os;
      bool first = true;
      for (const auto& [num, den] : c.explicit_utilities) {
        if (!first) os << ",";
        first = false;
        os << num;
        if (den != 1) os << "/" << den;
      }
      return os.str();
    }
  }
  return "?";
}

std::string GameConfig::canonical_text() const {
  std::ostringstream os;
  os << "agents=" << agents << "\n"
     << "memory=" << memory << "\n"
     << "strategies_per_agent=" << strategies_per_agent << "\n"
     << "payoff=" << payoff_name(payoff) << "\n"
     << "steps=" << steps << "\n"
     << "seed=" << seed << "\n"
     << "assignment=" << assignment_name(assignment) << "\n"
     << "initial_utilities=" << initial_utilities_name(*this) << "\n"
     << "initial_history=";
  if (initial_history)
    os << *initial_history;
  else
    os << "random";
  os << "\n"
     << "tracking=" << tracking_name(tracking) << "\n"
     << "record_utilities=" << (record_utilities ? "true" : "false") << "\n";
  return os.str();
}

std::uint64_t GameConfig::hash() const {
  const std::string text = canonical_text();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::pair<std::int64_t, std::int64_t>> parse_utility_list(
    const std::string& v) {
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto slash = item.find('/');
    if (slash == std::string::npos) {
      out.emplace_back(std::stoll(item), 1);
    } else {
      out.emplace_back(std::stoll(item.substr(0, slash)),
                       std::stoll(item.substr(slash + 1)));
    }
  }
  return out;
}

}  // namespace

GameConfig parse_config_text(const std::string& text, GameConfig base) {
  GameConfig cfg = base;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "agents") {
      cfg.agents = std::stoll(value);
    } else if (key == "memory") {
      cfg.memory = std::stoi(value);
    } else if (key == "strategies_per_agent") {
      cfg.strategies_per_agent = std::stoi(value);
    } else if (key == "payoff") {
      cfg.payoff = payoff_from_name(value);
    } else if (key == "steps") {
      cfg.steps = std::stoll(value);
    } else if (key == "seed") {
      cfg.seed = std::stoull(value);
    } else if (key == "assignment") {
      if (value == "independent")
        cfg.assignment = AssignmentMode::kIndependent;
      else if (value == "distinct")
        cfg.assignment = AssignmentMode::kDistinct;
      else
        throw std::invalid_argument("assignment must be independent or distinct");
    } else if (key == "initial_utilities") {
      if (value == "zero") {
        cfg.initial_utilities = InitialUtilities::kAllZero;
      } else if (value == "perturbed") {
        cfg.initial_utilities = InitialUtilities::kPerturbed;
      } else {
        cfg.initial_utilities = InitialUtilities::kExplicit;
        cfg.explicit_utilities = parse_utility_list(value);
      }
    } else if (key == "initial_history") {
      if (value == "random")
        cfg.initial_history.reset();
      else
        cfg.initial_history = static_cast<std::uint32_t>(std::stoul(value));
    } else if (key == "tracking") {
      if (value == "auto")
        cfg.tracking = UtilityTracking::kAuto;
      else if (value == "full")
        cfg.tracking = UtilityTracking::kFull;
      else if (value == "held")
        cfg.tracking = UtilityTracking::kHeld;
      else
        throw std::invalid_argument("tracking must be auto, full or held");
    } else if (key == "record_utilities") {
      cfg.record_utilities = (value == "true" || value == "1");
    } else if (key == "max_memory") {
      cfg.max_memory = std::stoi(value);
    } else {
      throw std::invalid_argument("unknown config key: " + key);
    }
  }
  cfg.validate();
  return cfg;
}

GameConfig load_config_file(const std::string& path, GameConfig base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return parse_config_text(os.str(), base);
}

}  // namespace mg
