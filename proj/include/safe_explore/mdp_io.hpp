#pragma once

#include <filesystem>
#include <string>

#include "safe_explore/mdp.hpp"

namespace safe_explore {

// JSON layout:
//   {"n_states": N, "n_actions": A, "terminal": [..],
//    "transitions": [{"s": s, "a": a, "branches": [{"sp": s', "p": p, "r": r, "d": d}, ...]}, ...]}

/// Parses without validating the kernel; structural JSON errors throw FormatError.
TabularMDP parse_mdp_json(const std::string& text);
/// Parses and rejects any kernel that fails validate().
TabularMDP load_mdp(const std::filesystem::path& path);
TabularMDP load_mdp_unchecked(const std::filesystem::path& path);

std::string mdp_to_json(const TabularMDP& mdp);
void save_mdp(const TabularMDP& mdp, const std::filesystem::path& path);

}  // namespace safe_explore
