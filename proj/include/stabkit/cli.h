#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace stabkit {

/// Exit codes: 0 success, 1 a verification check failed, 2 usage or schema
/// error, 3 numerical failure.
int RunCli(int argc, char** argv, std::ostream& out, std::ostream& err);

struct VerifyCheck {
  std::string label;
  bool pass = false;
  std::string detail;
};

/// Branch checks for id "5.1", "5.2" or "5.3". Throws std::invalid_argument
/// for other ids.
std::vector<VerifyCheck> VerifyExample(const std::string& id);

}  // namespace stabkit
