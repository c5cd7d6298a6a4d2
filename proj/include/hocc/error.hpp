#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hocc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class UnmappableTrackError : public Error {
 public:
  using Error::Error;
};

class GridTooLargeError : public Error {
 public:
  using Error::Error;
};

class DegeneratePlayerError : public Error {
 public:
  DegeneratePlayerError(int vehicle_id)
      : Error("vehicle " + std::to_string(vehicle_id) + " has no feasible trajectory"), vehicle_(vehicle_id) {}
  int vehicle() const { return vehicle_; }

 private:
  int vehicle_;
};

class IoError : public Error {
 public:
  IoError(const std::string& path, const std::string& what) : Error(path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace hocc
