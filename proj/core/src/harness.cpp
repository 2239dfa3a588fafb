#include "uf/harness.hpp"

#include "targets.hpp"
#include "uf/errors.hpp"

namespace uf {

ExecutionTrace TargetProgram::execute(const std::vector<uint8_t>& input) const {
  ExecutionTrace trace;
  execute_into(input.data(), input.size(), trace);
  return trace;
}

void TargetProgram::execute_into(const uint8_t* data, size_t len, ExecutionTrace& out) const {
  if (len > max_input_len)
    throw InputTooLongError("input of " + std::to_string(len) + " bytes exceeds limit of " +
                            std::to_string(max_input_len));
  out.clear();
  step(data, len, out);
}

const std::vector<TargetProgram>& list_targets() {
  static const std::vector<TargetProgram> targets = make_bundled_targets();
  return targets;
}

const TargetProgram& find_target(std::string_view name) {
  for (const TargetProgram& t : list_targets())
    if (t.name == name) return t;
  throw ConfigError("unknown target: " + std::string(name));
}

}  // namespace uf
