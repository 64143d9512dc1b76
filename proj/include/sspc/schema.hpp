#pragma once

// Copy of schema/experiment.schema.json; a unit test keeps the two identical.

namespace sspc {

inline constexpr const char* kExperimentSchema = R"SCHEMA({
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "$id": "https://sspc.invalid/experiment.schema.json",
  "title": "sspc experiment configuration",
  "type": "object",
  "additionalProperties": false,
  "required": ["kind"],
  "properties": {
    "kind": {"enum": ["pseudospectrum", "semigroup", "critical-radius", "hjb", "special", "quasimode", "brackets"]},
    "name": {"type": "string"},
    "model": {"$ref": "#/$defs/model"},
    "h": {"type": "array", "minItems": 1, "maxItems": 64, "items": {"type": "number", "exclusiveMinimum": 0, "maximum": 1}},
    "lambda": {"type": "array", "minItems": 1, "maxItems": 64, "items": {"type": "number", "exclusiveMinimum": 0}},
    "N": {"type": "integer", "minimum": 16, "maximum": 4096},
    "seed": {"type": "integer", "minimum": 0},
    "workers": {"type": "integer", "minimum": 0},
    "output": {"type": "string"},
    "pseudospectrum": {
      "type": "object",
      "additionalProperties": false,
      "required": ["re", "im", "nx", "ny"],
      "properties": {
        "re": {"$ref": "#/$defs/interval"},
        "im": {"$ref": "#/$defs/interval"},
        "nx": {"type": "integer", "minimum": 1, "maximum": 1000},
        "ny": {"type": "integer", "minimum": 1, "maximum": 1000},
        "spectrum": {"type": "boolean"}
      }
    },
    "semigroup": {
      "type": "object",
      "additionalProperties": false,
      "required": ["t_stop", "t_step"],
      "properties": {
        "t_stop": {"type": "number", "exclusiveMinimum": 0, "maximum": 10},
        "t_step": {"type": "number", "exclusiveMinimum": 0},
        "fit_window": {"$ref": "#/$defs/interval"}
      }
    },
    "critical_radius": {
      "type": "object",
      "additionalProperties": false,
      "required": ["z0", "direction", "threshold"],
      "properties": {
        "z0": {"$ref": "#/$defs/complex"},
        "direction": {"$ref": "#/$defs/complex"},
        "threshold": {"$ref": "#/$defs/threshold"},
        "hi": {"type": "number", "exclusiveMinimum": 0},
        "scan": {"type": "integer", "minimum": 1, "maximum": 10000},
        "rel_tol": {"type": "number", "exclusiveMinimum": 0, "maximum": 1}
      }
    },
    "hjb": {
      "type": "object",
      "additionalProperties": false,
      "required": ["x", "xi", "nx", "nxi", "t_end", "orbit_start"],
      "properties": {
        "x": {"$ref": "#/$defs/interval"},
        "xi": {"$ref": "#/$defs/interval"},
        "nx": {"type": "integer", "minimum": 16, "maximum": 2048},
        "nxi": {"type": "integer", "minimum": 16, "maximum": 2048},
        "t_end": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
        "dt": {"type": "number", "minimum": 0},
        "orbit_start": {"$ref": "#/$defs/point"},
        "orbit_steps": {"type": "integer", "minimum": 1, "maximum": 100000},
        "k": {"type": "integer", "minimum": 1, "maximum": 8},
        "fit_window": {"$ref": "#/$defs/interval"},
        "csv_every": {"type": "integer", "minimum": 1}
      }
    },
    "special": {
      "type": "object",
      "additionalProperties": false,
      "required": ["k", "s_start", "s_stop", "s_step"],
      "properties": {
        "k": {"type": "array", "minItems": 1, "items": {"type": "integer", "minimum": 1, "maximum": 16}},
        "s_start": {"type": "number", "minimum": -50, "maximum": 50},
        "s_stop": {"type": "number", "minimum": -50, "maximum": 50},
        "s_step": {"type": "number", "exclusiveMinimum": 0},
        "budget": {"type": "number", "exclusiveMinimum": 0},
        "laplace_s": {"type": "number", "exclusiveMinimum": 0, "maximum": 50}
      }
    },
    "quasimode": {
      "type": "object",
      "additionalProperties": false,
      "required": ["center"],
      "properties": {
        "center": {"$ref": "#/$defs/point"},
        "grid": {"type": "integer", "minimum": 0, "maximum": 65536}
      }
    },
    "brackets": {
      "type": "object",
      "additionalProperties": false,
      "required": ["points"],
      "properties": {
        "points": {"type": "array", "minItems": 1, "items": {"type": "array", "minItems": 2, "maxItems": 16, "items": {"type": "number"}}},
        "j_max": {"type": "integer", "minimum": 1, "maximum": 8}
      }
    }
  },
  "allOf": [
    {"if": {"properties": {"kind": {"const": "pseudospectrum"}}}, "then": {"required": ["model", "pseudospectrum"]}},
    {"if": {"properties": {"kind": {"const": "semigroup"}}}, "then": {"required": ["model", "h", "semigroup"]}},
    {"if": {"properties": {"kind": {"const": "critical-radius"}}}, "then": {"required": ["model", "critical_radius"]}},
    {"if": {"properties": {"kind": {"const": "hjb"}}}, "then": {"required": ["model", "hjb"]}},
    {"if": {"properties": {"kind": {"const": "special"}}}, "then": {"required": ["special"]}},
    {"if": {"properties": {"kind": {"const": "quasimode"}}}, "then": {"required": ["model", "h", "quasimode"]}},
    {"if": {"properties": {"kind": {"const": "brackets"}}}, "then": {"required": ["model", "brackets"]}}
  ],
  "$defs": {
    "model": {
      "type": "object",
      "additionalProperties": false,
      "required": ["id"],
      "properties": {
        "id": {"enum": ["circle-advection", "torus-schrodinger", "nsa-harmonic", "kfp"]},
        "amplitude": {"type": "number"},
        "quartic": {"type": "number"},
        "rotate_about": {"$ref": "#/$defs/complex"}
      }
    },
    "complex": {"type": "array", "minItems": 2, "maxItems": 2, "items": {"type": "number"}},
    "interval": {"type": "array", "minItems": 2, "maxItems": 2, "items": {"type": "number"}},
    "point": {"type": "array", "minItems": 2, "maxItems": 2, "items": {"type": "number"}},
    "threshold": {
      "type": "object",
      "additionalProperties": false,
      "required": ["rule"],
      "properties": {
        "rule": {"enum": ["polynomial", "boundary-multiple", "exp-quarter", "fixed"]},
        "a": {"type": "number", "exclusiveMinimum": 0},
        "K": {"type": "number", "exclusiveMinimum": 0},
        "k": {"type": "integer", "minimum": 1, "maximum": 8},
        "value": {"type": "number", "exclusiveMinimum": 0}
      }
    }
  }
}
)SCHEMA";

}  // namespace sspc
