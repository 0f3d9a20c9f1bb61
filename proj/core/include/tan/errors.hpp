#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tanav {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OutOfBounds : public Error {
 public:
  using Error::Error;
};

class NoData : public Error {
 public:
  using Error::Error;
};

class ValueError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class NoHit : public Error {
 public:
  using Error::Error;
};

/// A sensor or predictor ray escaped the terrain (or the DEM) without a hit.
class RayMiss : public Error {
 public:
  explicit RayMiss(std::size_t index)
      : Error("ray " + std::to_string(index) + " missed the terrain"), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class DegenerateGeometry : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class TerrainCollision : public Error {
 public:
  using Error::Error;
};

class AllZeroWeights : public Error {
 public:
  using Error::Error;
};

class SingularInnovation : public Error {
 public:
  using Error::Error;
};

class EmptyTrace : public Error {
 public:
  using Error::Error;
};

/// Configuration problems: the CLI maps these to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class UnknownPreset : public ConfigError {
 public:
  explicit UnknownPreset(const std::string& id) : ConfigError("unknown scenario preset '" + id + "'") {}
};

class SchemaError : public ConfigError {
 public:
  SchemaError(const std::string& path, const std::string& what)
      : ConfigError(path + ": " + what), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// A module error raised inside the scenario loop, annotated with the step.
class ScenarioError : public Error {
 public:
  ScenarioError(std::size_t step, const std::string& what)
      : Error("step " + std::to_string(step) + ": " + what), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace tanav
