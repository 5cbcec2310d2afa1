#include "b2mdf/errors.hpp"

namespace b2mdf {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::UnencodableValue: return "UnencodableValue";
    case ErrorKind::BadHexString: return "BadHexString";
    case ErrorKind::Unauthorized: return "Unauthorized";
    case ErrorKind::StaleChain: return "StaleChain";
    case ErrorKind::SignatureFailure: return "SignatureFailure";
    case ErrorKind::MissingChain: return "MissingChain";
    case ErrorKind::UnparseableChain: return "UnparseableChain";
    case ErrorKind::AppendRejected: return "AppendRejected";
    case ErrorKind::NotAZip: return "NotAZip";
    case ErrorKind::MalformedZip: return "MalformedZip";
    case ErrorKind::CrcMismatch: return "CrcMismatch";
    case ErrorKind::UnsupportedCompression: return "UnsupportedCompression";
    case ErrorKind::MalformedAxml: return "MalformedAxml";
    case ErrorKind::MalformedXml: return "MalformedXml";
    case ErrorKind::MissingPackage: return "MissingPackage";
    case ErrorKind::TruncatedVarint: return "TruncatedVarint";
    case ErrorKind::OverlongVarint: return "OverlongVarint";
    case ErrorKind::BadMagic: return "BadMagic";
    case ErrorKind::TruncatedFile: return "TruncatedFile";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::UnknownOpcode: return "UnknownOpcode";
    case ErrorKind::TruncatedInstruction: return "TruncatedInstruction";
    case ErrorKind::EmptyTrace: return "EmptyTrace";
    case ErrorKind::BadToken: return "BadToken";
    case ErrorKind::EmptyFile: return "EmptyFile";
    case ErrorKind::BadHeader: return "BadHeader";
    case ErrorKind::RaggedRow: return "RaggedRow";
    case ErrorKind::NonNumeric: return "NonNumeric";
    case ErrorKind::NoSamples: return "NoSamples";
    case ErrorKind::ConflictingBlocks: return "ConflictingBlocks";
    case ErrorKind::NonFiniteScore: return "NonFiniteScore";
    case ErrorKind::MissingFeatures: return "MissingFeatures";
    case ErrorKind::InvalidParticipantCount: return "InvalidParticipantCount";
    case ErrorKind::NoScoreRecord: return "NoScoreRecord";
    case ErrorKind::AlreadyIngested: return "AlreadyIngested";
    case ErrorKind::VersionRegression: return "VersionRegression";
    case ErrorKind::VersionConflict: return "VersionConflict";
    case ErrorKind::NoScores: return "NoScores";
    case ErrorKind::UnreadableStore: return "UnreadableStore";
    case ErrorKind::StoreLocked: return "StoreLocked";
    case ErrorKind::BadConfig: return "BadConfig";
    case ErrorKind::IoError: return "IoError";
  }
  return "UnknownError";
}

}  // namespace b2mdf
