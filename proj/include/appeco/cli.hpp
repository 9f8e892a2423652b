#pragma once

#include <string>
#include <vector>

namespace appeco {

// Exit codes: 0 success, 1 usage error, 2 data/parse error,
// 3 completed with nonconvergence or skipped items (partial results written).
int cli_dispatch(const std::vector<std::string>& args);

}  // namespace appeco
