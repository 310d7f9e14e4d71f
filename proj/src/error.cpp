#include "docmap/error.hpp"

namespace docmap {

ExitCode exit_code(const std::exception& e) noexcept {
    if (dynamic_cast<const ValidationError*>(&e) || dynamic_cast<const ContractError*>(&e) ||
        dynamic_cast<const ParseError*>(&e)) {
        return ExitCode::validation;
    }
    if (dynamic_cast<const IoError*>(&e) || dynamic_cast<const FetchError*>(&e)) return ExitCode::io;
    if (dynamic_cast<const NumericError*>(&e)) return ExitCode::numeric;
    return ExitCode::failure;
}

}  // namespace docmap
