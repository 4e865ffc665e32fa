#pragma once

#include <filesystem>
#include <string>

#include "popproto/model.hpp"
#include "popproto/semantics.hpp"
#include "popproto/specs.hpp"

namespace popproto {

// Protocol file:
//   protocol <name> mode=(plain|shutdown)
//   state <id> output=<token> [shutdown=<id>] [input]
//   bot <id>
//   trans <q1> <q2> -> <q1'> <q2'>
// '#' starts a comment. Errors carry the offending line number.
Protocol parse_protocol(const std::string& text);

/// Canonical form: states in declaration order, transitions sorted by state names.
std::string emit_protocol(const Protocol& p);

// Spec file:
//   spec <name> / inputs <id>... / outputs <token>... / formula <expr>
// or a composition
//   composed <A> <B>
// followed either by inline spec blocks named A and B, or by nothing, in which
// case A and B are file references resolved against base_dir.
AnySpec parse_spec_file(const std::string& text, const std::filesystem::path& base_dir = {});

/// Composed specs are emitted with both halves inline.
std::string emit_spec(const AnySpec& spec);

// Trace file: "INIT <id>=<state>..." then one line per step
//   STEP <k> PROTOCOL <a1> <a2> <q1> <q2> -> <q1'> <q2'>
//   STEP <k> REQUEST <a>
//   STEP <k> REMOVE <a>
std::string emit_trace(const Protocol& p, const Trace& trace);
/// Rebuilds the configurations by applying each step; invalid steps throw.
Trace parse_trace(const Protocol& p, const std::string& text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

/// A file path or "builtin:<key>".
Protocol load_protocol(const std::string& ref);
AnySpec load_spec(const std::string& ref);

}  // namespace popproto
