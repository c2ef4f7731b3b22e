#ifndef SYMDISS_BUILTINS_HPP
#define SYMDISS_BUILTINS_HPP

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "symdiss/abstraction.hpp"
#include "symdiss/systems.hpp"

namespace symdiss {

/* bundled demo systems: a scalar state-measured plant and an output-measured
 * five-state plant with its two-state software controller */

ContinuousSystem example1_system();
AbstractionParams example1_params(RadiusMode mode = RadiusMode::kFigure);

ContinuousSystem example2_plant();
ContinuousSystem example2_controller();
AbstractionParams example2_params();

std::vector<std::string> builtin_names();
bool is_builtin(const std::string& name);

/* complete analysis config with the builtin's default parameter blocks */
nlohmann::json builtin_config(const std::string& name);

}  // namespace symdiss

#endif
