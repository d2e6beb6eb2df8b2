/*
 * Copyright 2026 The semantic_vtr Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "vtr/eval.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Semantic visual teach-and-repeat engine"};
  app.require_subcommand(1);

  std::string world_file, map_file, start_text, direction_text = "fwd";
  std::string starts_file, moves_file, out_file, config_file;
  std::uint64_t seed = 1;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--world", world_file, "world spec JSON")->required();
    cmd->add_option("--out", out_file, "output file")->required();
    cmd->add_option("--seed", seed, "run seed");
    cmd->add_option("--config", config_file, "config JSON overriding defaults");
  };

  CLI::App* teach = app.add_subcommand("teach", "drive the teach path and save the map");
  add_common(teach);
  teach->add_option("--start", start_text, "start pose \"x,y,heading_deg\"")->required();

  CLI::App* repeat = app.add_subcommand("repeat", "run one repeat trial");
  add_common(repeat);
  repeat->add_option("--map", map_file, "teach map JSON")->required();
  repeat->add_option("--start", start_text, "start pose \"x,y,heading_deg\"")->required();
  repeat->add_option("--direction", direction_text, "fwd or bwd");

  CLI::App* eval = app.add_subcommand("eval", "batch-evaluate repeat trials");
  add_common(eval);
  eval->add_option("--map", map_file, "teach map JSON")->required();
  eval->add_option("--starts", starts_file, "JSON array of [x, y, heading_deg]")->required();
  eval->add_option("--direction", direction_text, "fwd or bwd");

  CLI::App* perturb = app.add_subcommand("perturb", "move objects in a world spec");
  perturb->add_option("--world", world_file, "world spec JSON")->required();
  perturb->add_option("--moves", moves_file, "JSON array of {label, pos}")->required();
  perturb->add_option("--out", out_file, "output world JSON")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    vtr::EvalConfig config;
    if (!config_file.empty()) config = vtr::load_config(config_file);

    if (teach->parsed()) {
      return vtr::cmd_teach(world_file, vtr::parse_start_pose(start_text),
                            out_file, seed, config, std::cout, std::cerr);
    }
    if (repeat->parsed()) {
      return vtr::cmd_repeat(world_file, map_file,
                             vtr::parse_start_pose(start_text),
                             vtr::parse_direction(direction_text), out_file,
                             seed, config, std::cout, std::cerr);
    }
    if (eval->parsed()) {
      return vtr::cmd_eval(world_file, map_file, starts_file,
                           vtr::parse_direction(direction_text), out_file, seed,
                           config, std::cout, std::cerr);
    }
    if (perturb->parsed()) {
      return vtr::cmd_perturb(world_file, moves_file, out_file, std::cout,
                              std::cerr);
    }
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  return 1;
}
