// Bundled fixtures and the plain-text reports regenerated from them.
#pragma once

#include <string>
#include <vector>

#include "provlock/model.hpp"

namespace provlock {

const std::vector<std::string>& fixture_ids();
bool is_fixture_id(const std::string& id);

std::string fixture_path(const std::string& data_dir, const std::string& id);
std::string expected_path(const std::string& data_dir, const std::string& id);

Workflow load_fixture(const std::string& data_dir, const std::string& id);

// Deterministic report for one fixture.  Throws Error("UnknownFixture").
std::string reproduce_fixture(const std::string& data_dir, const std::string& id, int jobs = 1);

}  // namespace provlock
