// trailnav command line: genworld, run, plan, sweep, export-map.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "trailnav/error.hpp"
#include "trailnav/harness/config.hpp"
#include "trailnav/harness/run.hpp"
#include "trailnav/harness/sweep.hpp"
#include "trailnav/planner.hpp"
#include "trailnav/sim/world.hpp"
#include "trailnav/traversability_map.hpp"

namespace th = trailnav::harness;
namespace ts = trailnav::sim;

namespace
{

/// Config file first, then one flag per registered key, then shortcuts.
struct ConfigOptions
{
  std::string config_file;
  std::map<std::string, std::string> values;

  void attach(CLI::App & app, const std::string & prefix_filter = "")
  {
    app.add_option("--config", config_file, "key=value config file")->check(CLI::ExistingFile);
    for (const auto & key : th::config_keys()) {
      if (!prefix_filter.empty() && key.name.rfind(prefix_filter, 0) != 0) {
        continue;
      }
      app.add_option_function<std::string>("--" + key.name,
        [this, name = key.name](const std::string & v) {values[name] = v;}, key.help);
    }
  }

  th::RunConfig resolve() const
  {
    th::RunConfig cfg;
    if (!config_file.empty()) {
      th::load_config_file(cfg, config_file);
    }
    for (const auto & [k, v] : values) {
      th::set_config_value(cfg, k, v);
    }
    return cfg;
  }
};

trailnav::Point3 parse_point(const std::string & text)
{
  std::vector<double> v;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(part, &used));
      if (used != part.size()) {
        throw std::invalid_argument(part);
      }
    } catch (const std::exception &) {
      throw trailnav::ParamError("expected x,y,z but got '" + text + "'");
    }
  }
  if (v.size() != 3) {
    throw trailnav::ParamError("expected x,y,z but got '" + text + "'");
  }
  return {v[0], v[1], v[2]};
}

void print_summary(const th::RunOutcome & out)
{
  std::printf("success=%d time_s=%.3f distance_m=%.3f pct_on_trail=%.2f plans=%zu registered=%zu "
    "tree_violations=%zu trajectory_violations=%zu blocked=%zu wall_s=%.2f%s%s\n",
    out.metrics.success ? 1 : 0, out.metrics.time_to_traverse, out.metrics.distance_traveled, out.metrics.pct_on_trail,
    out.plans, out.registered_frames, out.tree_node_violations, out.trajectory_violations, out.blocked_steps,
    out.wall_seconds, out.failure.empty() ? "" : " failure=", out.failure.c_str());
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Semantic and geometric traversability mapping and planning toolkit"};
  app.require_subcommand(1);

  // genworld
  auto * gen = app.add_subcommand("genworld", "generate a world file");
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  std::string gen_preset;
  ts::WorldParams wp;
  gen->add_option("--seed", gen_seed, "world seed");
  gen->add_option("--out", gen_out, "output world file")->required();
  gen->add_option("--preset", gen_preset, "bundled reference world (path1, path2)");
  gen->add_option("--extent-x", wp.extent_x);
  gen->add_option("--extent-y", wp.extent_y);
  gen->add_option("--resolution", wp.resolution);
  gen->add_option("--trail-length", wp.trail_length);
  gen->add_option("--trail-width", wp.trail_width);
  gen->add_option("--obstacle-density", wp.obstacle_density, "trees per 100 m^2");
  gen->add_option("--hazard-count", wp.hazard_count);
  gen->add_option("--vegetation-fraction", wp.vegetation_fraction);
  gen->add_option("--roughness", wp.roughness);
  gen->add_option("--trail-roughness", wp.trail_roughness, "tread bump amplitude inside the trail");

  // run
  auto * run = app.add_subcommand("run", "closed-loop navigation run");
  ConfigOptions run_opts;
  run_opts.attach(*run);
  std::optional<std::string> run_world, run_out;
  std::optional<double> run_weight;
  std::optional<std::uint64_t> run_seed;
  run->add_option("--world", run_world, "preset or world file");
  run->add_option("--weight,-w", run_weight, "fusion weight");
  run->add_option("--seed", run_seed, "run seed");
  run->add_option("--out", run_out, "artifact directory");

  // sweep
  auto * sweep = app.add_subcommand("sweep", "weight x seed grid");
  ConfigOptions sweep_opts;
  sweep_opts.attach(*sweep);
  std::vector<double> sweep_weights;
  std::vector<std::uint64_t> sweep_seeds{0, 1, 2, 3, 4};
  std::optional<std::string> sweep_world;
  std::string sweep_out;
  sweep->add_option("--weights", sweep_weights, "fusion weights")->required()->delimiter(',')->expected(1, -1);
  sweep->add_option("--seeds", sweep_seeds, "run seeds")->delimiter(',')->expected(1, -1);
  sweep->add_option("--world", sweep_world, "preset or world file");
  sweep->add_option("--out", sweep_out, "output directory for sweep.csv and sweep_summary.csv")->required();

  // plan
  auto * planc = app.add_subcommand("plan", "plan on a saved traversability map");
  ConfigOptions plan_opts;
  plan_opts.attach(*planc, "planner.");
  std::string plan_map, plan_start, plan_goal, plan_out, plan_tree;
  std::uint64_t plan_seed = 0;
  planc->add_option("--map", plan_map, "map PLY")->required();
  planc->add_option("--start", plan_start, "x,y,z")->required();
  planc->add_option("--goal", plan_goal, "x,y,z")->required();
  planc->add_option("--out", plan_out, "waypoint CSV")->required();
  planc->add_option("--tree", plan_tree, "optional tree CSV");
  planc->add_option("--seed", plan_seed, "planner seed");

  // export-map
  auto * exp = app.add_subcommand("export-map", "map the trail by driving along it and save the PLY");
  ConfigOptions exp_opts;
  exp_opts.attach(*exp);
  std::optional<std::string> exp_world;
  std::optional<double> exp_weight;
  std::string exp_out;
  exp->add_option("--world", exp_world, "preset or world file");
  exp->add_option("--weight,-w", exp_weight, "fusion weight");
  exp->add_option("--out", exp_out, "map PLY")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp & e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp & e) {
    return app.exit(e);
  } catch (const CLI::ParseError & e) {
    app.exit(e);
    return th::kExitInput;
  }

  try {
    if (*gen) {
      ts::WorldModel world;
      if (!gen_preset.empty()) {
        auto preset = ts::preset_world(gen_preset);
        if (!preset) {
          throw trailnav::ParamError("unknown preset '" + gen_preset + "'");
        }
        world = std::move(*preset);
      } else {
        world = ts::generate_world(gen_seed, wp);
      }
      ts::save_world_file(gen_out, world);
      return th::kExitOk;
    }

    if (*run) {
      th::RunConfig cfg = run_opts.resolve();
      if (run_world) {
        cfg.world = *run_world;
      }
      if (run_weight) {
        cfg.weight = *run_weight;
      }
      if (run_seed) {
        cfg.seed = *run_seed;
      }
      if (run_out) {
        cfg.output_dir = *run_out;
      }
      const ts::WorldModel world = th::load_run_world(cfg.world);
      const th::RunOutcome out = th::run_closed_loop(cfg, world);
      print_summary(out);
      return out.exit_code();
    }

    if (*sweep) {
      th::RunConfig cfg = sweep_opts.resolve();
      if (sweep_world) {
        cfg.world = *sweep_world;
      }
      const ts::WorldModel world = th::load_run_world(cfg.world);
      std::filesystem::create_directories(sweep_out);
      const th::SweepReport report = th::run_sweep(cfg, world, sweep_weights, sweep_seeds,
          [](const th::SweepRow & row) {
            std::printf("w=%.2f seed=%llu success=%d time_s=%.2f distance_m=%.2f pct_on_trail=%.2f violations=%zu/%zu%s%s\n",
            row.weight, static_cast<unsigned long long>(row.seed), row.metrics.success ? 1 : 0,
            row.metrics.time_to_traverse, row.metrics.distance_traveled, row.metrics.pct_on_trail,
            row.tree_node_violations, row.trajectory_violations, row.failure.empty() ? "" : " failure=",
            row.failure.c_str());
            std::fflush(stdout);
          });
      std::ofstream(std::filesystem::path(sweep_out) / "sweep.csv") << th::sweep_rows_csv(report);
      std::ofstream(std::filesystem::path(sweep_out) / "sweep_summary.csv") << th::sweep_summary_csv(report);
      std::cout << th::sweep_summary_csv(report);
      return th::kExitOk;
    }

    if (*planc) {
      const th::RunConfig cfg = plan_opts.resolve();
      trailnav::PlanConfig pc = cfg.planner;
      pc.rng_seed = plan_seed;
      auto map = std::make_shared<const trailnav::TraversabilityMap>(trailnav::read_map(plan_map));
      const auto result = trailnav::plan(map, parse_point(plan_start), parse_point(plan_goal), pc);
      if (!plan_tree.empty()) {
        trailnav::write_tree_csv(plan_tree, result.tree);
      }
      if (!result.success) {
        std::fprintf(stderr, "planner did not reach the goal in %zu iterations\n", result.iterations);
        return th::kExitNavigation;
      }
      trailnav::write_waypoints_csv(plan_out, result.waypoints);
      std::printf("waypoints=%zu cost=%.6f tree=%zu\n", result.waypoints.size(), result.total_cost, result.tree.size());
      return th::kExitOk;
    }

    if (*exp) {
      th::RunConfig cfg = exp_opts.resolve();
      if (exp_world) {
        cfg.world = *exp_world;
      }
      if (exp_weight) {
        cfg.weight = *exp_weight;
      }
      const ts::WorldModel world = th::load_run_world(cfg.world);
      const auto map = th::build_map_along_trail(cfg, world);
      trailnav::write_map(exp_out, map);
      std::printf("points=%zu\n", map.size());
      return th::kExitOk;
    }
  } catch (const trailnav::NoTraversableSpace & e) {
    std::fprintf(stderr, "navigation failure: %s\n", e.what());
    return th::kExitNavigation;
  } catch (const trailnav::CollisionSpace & e) {
    std::fprintf(stderr, "navigation failure: %s\n", e.what());
    return th::kExitNavigation;
  } catch (const std::exception & e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return th::kExitInput;
  }
  return th::kExitInput;
}
