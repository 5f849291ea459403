#pragma once

#include <string>
#include <vector>

#include "archevol/rewrite.hpp"

namespace archevol {

/// The eight client-server introduction rules, in the order CreateServer,
/// CreateClient, MoveComponentToServer, MoveComponentToClient,
/// DelegateProvPortToServer, DelegateReqPortToServer,
/// DelegateProvPortToClient, DelegateReqPortToClient.
///
/// The Create rules take a `name` parameter for the new component and its
/// configuration. Move and Delegate rules match exact `Component` nodes, so
/// a Client or Server is never moved into another one.
std::vector<Rule> client_server_rules();

/// A named rule sequence over a builtin rule set.
struct BuiltinSequence {
    std::string name;
    std::string text;
    Bindings bindings;
};

/// "server-intro": CreateServer; (MoveComponentToServer)*;
/// (DelegateProvPortToServer)*; (DelegateReqPortToServer)* with name=Server.
/// "client-intro" is its client mirror.
std::vector<BuiltinSequence> builtin_sequences();

/// Rule sets by name; currently only "client-server-rules". Throws
/// DefinitionError for an unknown name.
std::vector<Rule> builtin_rule_set(const std::string& name);

}  // namespace archevol
