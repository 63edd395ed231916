// Child process for the external objective protocol tests.
// Usage: objective_stub zero|f1|sleep|malformed|fail|silent

#include "json.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <numbers>
#include <string>
#include <thread>

int main(int argc, char** argv) {
  const std::string mode = argc > 1 ? argv[1] : "zero";
  std::string line;
  if (!std::getline(std::cin, line)) return 3;
  const auto request = nlohmann::json::parse(line);
  const double x1 = request.at("x").at(0).get<double>();
  const double x2 = request.at("x").at(1).get<double>();

  if (mode == "zero") {
    std::cout << "{\"y\": 0.0}\n";
  } else if (mode == "f1") {
    const double y = x1 * x1 + x2 * x2 + std::sin(2.0 * std::numbers::pi * x1) + std::cos(2.0 * std::numbers::pi * x2);
    std::cout << nlohmann::json{{"y", y}}.dump(-1, ' ', false, nlohmann::json::error_handler_t::strict) << "\n";
  } else if (mode == "sleep") {
    std::this_thread::sleep_for(std::chrono::seconds(30));
    std::cout << "{\"y\": 0.0}\n";
  } else if (mode == "malformed") {
    std::cout << "y = 0.0\n";
  } else if (mode == "fail") {
    return 7;
  } else if (mode == "silent") {
    return 0;
  }
  return 0;
}
