#pragma once

#include <stdexcept>
#include <string>

namespace b2mdf {

// Every failure the library reports carries one of these codes so callers
// (and the CLI) can dispatch without string matching.
enum class ErrorKind {
  // serialization / crypto
  UnencodableValue,
  BadHexString,
  // ledger
  Unauthorized,
  StaleChain,
  SignatureFailure,
  MissingChain,
  UnparseableChain,
  AppendRejected,
  // zip container
  NotAZip,
  MalformedZip,
  CrcMismatch,
  UnsupportedCompression,
  // manifest
  MalformedAxml,
  MalformedXml,
  MissingPackage,
  // dex
  TruncatedVarint,
  OverlongVarint,
  BadMagic,
  TruncatedFile,
  IndexOutOfRange,
  UnknownOpcode,
  TruncatedInstruction,
  // dynamic features
  EmptyTrace,
  BadToken,
  EmptyFile,
  BadHeader,
  RaggedRow,
  NonNumeric,
  NoSamples,
  // engines
  ConflictingBlocks,
  NonFiniteScore,
  MissingFeatures,
  // consensus
  InvalidParticipantCount,
  NoScoreRecord,
  // pipeline
  AlreadyIngested,
  VersionRegression,
  VersionConflict,
  NoScores,
  UnreadableStore,
  StoreLocked,
  BadConfig,
  IoError,
};

const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }
  const char* kind_name() const { return error_kind_name(kind_); }

 private:
  ErrorKind kind_;
};

}  // namespace b2mdf
