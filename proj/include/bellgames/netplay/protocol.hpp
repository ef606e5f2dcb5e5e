#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "bellgames/quantum.hpp"
#include "bellgames/version.hpp"

// Wire protocol: versioned newline-delimited JSON documents, one message per
// line, UTF-8. Every message carries {"v": 1, "type": ..., "round": ...};
// type-specific payload fields sit beside them in the same flat object.

namespace bellgames::netplay {

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class MessageType { Hello, Question, Answer, Result, Summary, Measure, Outcome, Error };

inline const char* message_type_name(MessageType t) {
  switch (t) {
    case MessageType::Hello: return "HELLO";
    case MessageType::Question: return "QUESTION";
    case MessageType::Answer: return "ANSWER";
    case MessageType::Result: return "RESULT";
    case MessageType::Summary: return "SUMMARY";
    case MessageType::Measure: return "MEASURE";
    case MessageType::Outcome: return "OUTCOME";
    case MessageType::Error: return "ERROR";
  }
  return "?";
}

struct WireMessage {
  MessageType type = MessageType::Error;
  int round = 0;
  nlohmann::json payload = nlohmann::json::object();  // flat; v/type/round reserved

  bool operator==(const WireMessage& o) const {
    return type == o.type && round == o.round && payload == o.payload;
  }

  // Typed payload access with protocol-grade errors.
  const nlohmann::json& field(const char* name) const {
    const auto it = payload.find(name);
    if (it == payload.end())
      throw ProtocolError(std::string("missing field '") + name + "' in " +
                          message_type_name(type));
    return *it;
  }
  int int_field(const char* name) const {
    const auto& f = field(name);
    if (!f.is_number_integer()) throw ProtocolError(std::string("field '") + name + "' not an integer");
    return f.get<int>();
  }
  std::string string_field(const char* name) const {
    const auto& f = field(name);
    if (!f.is_string()) throw ProtocolError(std::string("field '") + name + "' not a string");
    return f.get<std::string>();
  }
  int sign_field(const char* name) const {
    const int v = int_field(name);
    if (v != 1 && v != -1) throw ProtocolError(std::string("field '") + name + "' must be +-1");
    return v;
  }
};

inline nlohmann::json setting_to_json(const MeasurementSetting& s) {
  switch (s.basis) {
    case Basis::PauliX: return {{"basis", "pauli_x"}};
    case Basis::PauliY: return {{"basis", "pauli_y"}};
    case Basis::PlanarXZ: return {{"basis", "planar_xz"}, {"theta", s.theta}};
  }
  throw ProtocolError("unknown measurement basis");
}

inline MeasurementSetting setting_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("basis") || !j["basis"].is_string())
    throw ProtocolError("setting must be an object with a 'basis' string");
  const std::string basis = j["basis"].get<std::string>();
  if (basis == "pauli_x") return MeasurementSetting::pauli_x();
  if (basis == "pauli_y") return MeasurementSetting::pauli_y();
  if (basis == "planar_xz") {
    if (!j.contains("theta") || !j["theta"].is_number())
      throw ProtocolError("planar_xz setting needs a numeric 'theta'");
    return MeasurementSetting::planar_xz(j["theta"].get<double>());
  }
  throw ProtocolError("unknown measurement basis '" + basis + "'");
}

inline MessageType message_type_from_name(const std::string& name) {
  for (const auto t : {MessageType::Hello, MessageType::Question, MessageType::Answer,
                       MessageType::Result, MessageType::Summary, MessageType::Measure,
                       MessageType::Outcome, MessageType::Error}) {
    if (name == message_type_name(t)) return t;
  }
  throw ProtocolError("unknown message type '" + name + "'");
}

// One line of UTF-8 JSON, newline appended by the transport.
inline std::string encode_message(const WireMessage& m) {
  nlohmann::json j = m.payload;
  if (j.contains("v") || j.contains("type") || j.contains("round"))
    throw ProtocolError("payload must not use the reserved keys v/type/round");
  j["v"] = kProtocolVersion;
  j["type"] = message_type_name(m.type);
  j["round"] = m.round;
  return j.dump();
}

inline WireMessage decode_message(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error&) {
    throw ProtocolError("malformed message");
  }
  if (!j.is_object()) throw ProtocolError("malformed message");
  if (!j.contains("v") || !j["v"].is_number_integer())
    throw ProtocolError("missing protocol version");
  if (j["v"].get<int>() != kProtocolVersion)
    throw ProtocolError("unsupported protocol version " + j["v"].dump());
  if (!j.contains("type") || !j["type"].is_string()) throw ProtocolError("missing message type");
  if (!j.contains("round") || !j["round"].is_number_integer() || j["round"].get<int>() < 0)
    throw ProtocolError("missing or negative round");

  WireMessage m;
  m.type = message_type_from_name(j["type"].get<std::string>());
  m.round = j["round"].get<int>();
  j.erase("v");
  j.erase("type");
  j.erase("round");
  m.payload = std::move(j);

  // Required payload per type.
  switch (m.type) {
    case MessageType::Hello:
      m.string_field("role");
      break;
    case MessageType::Question:
      m.string_field("q");
      m.int_field("deadline_ms");
      break;
    case MessageType::Answer:
      m.sign_field("answer");
      break;
    case MessageType::Result:
      if (!m.field("win").is_boolean()) throw ProtocolError("field 'win' not a boolean");
      break;
    case MessageType::Summary:
      if (!m.field("stats").is_object()) throw ProtocolError("field 'stats' not an object");
      break;
    case MessageType::Measure:
      m.int_field("player");
      setting_from_json(m.field("setting"));
      break;
    case MessageType::Outcome:
      m.sign_field("outcome");
      break;
    case MessageType::Error:
      m.string_field("text");
      break;
  }
  return m;
}

inline WireMessage make_error(const std::string& text, int round = 0) {
  WireMessage m;
  m.type = MessageType::Error;
  m.round = round;
  m.payload = {{"text", text}};
  return m;
}

}  // namespace bellgames::netplay
