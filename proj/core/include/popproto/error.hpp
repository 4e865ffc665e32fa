#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace popproto {

enum class ErrorCode {
  // model
  BadToken,
  DuplicateState,
  UnknownState,
  BotNotSilent,
  BotBadMaps,
  EmptyInputs,
  ModeMismatch,
  // semantics
  StateMismatch,
  SameAgent,
  UnknownAgent,
  PlainModeNoRequests,
  PlainModeNoRemoval,
  NotInBot,
  BadScript,
  // specs
  SyntaxError,
  DomainMismatch,
  UnknownPairAtom,
  AlphabetMismatch,
  BudgetExceeded,
  // verifier
  Explosion,
  // composer
  NotDisjoint,
  NotCompatible,
  BotOutputLeak,
  // protolib / io
  UnknownKey,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace popproto
