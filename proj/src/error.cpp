#include "otsphere/error.hpp"

namespace otsphere {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateFrame: return "DegenerateFrame";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::DegenerateCell: return "DegenerateCell";
    case ErrorCode::InvalidMesh: return "InvalidMesh";
    case ErrorCode::NotPointwise: return "NotPointwise";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::CellNotFound: return "CellNotFound";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::RootBracketFailure: return "RootBracketFailure";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::PoleProximity: return "PoleProximity";
    case ErrorCode::FoldDetected: return "FoldDetected";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace otsphere
