#pragma once

#include <string>

namespace lwo {

struct Clause {
    std::string name;
    bool passed = false;
    // Holds only under a theorem hypothesis; structural clauses must hold for
    // every artifact the algorithms emit.
    bool conditional = false;
    std::string detail;
};

}  // namespace lwo
