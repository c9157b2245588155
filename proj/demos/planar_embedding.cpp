// Embeds a square and a three-lobed star into slightly larger discs by area-
// preserving maps, and prints where a few points land.
#include "symcap/moser.hpp"

#include <cstdio>

using namespace symcap;

int main() {
  const PlanarDomain square = PlanarDomain::rectangle({0, 0}, 0.5, 0.5);
  VolumeEmbedOptions opt;
  opt.moser.grid = 256;
  opt.strict = false;
  const GridMap2D g = volume_embed(square, 1.1, opt);
  std::printf("square -> disc of area 1.1: branch %s, |det - 1| <= %.2e, image radius %.4f < %.4f\n",
              g.branch.c_str(), g.max_jacobian_deviation(), g.max_image_radius(), std::sqrt(1.1 / pi));
  for (const Vec2& x : {Vec2(0.49, 0.49), Vec2(0.49, 0.0), Vec2(0.0, 0.0)}) {
    const Vec2 y = g.map(x);
    std::printf("  (% .2f, % .2f) -> (% .4f, % .4f)\n", x.x(), x.y(), y.x(), y.y());
  }

  const PlanarDomain star = PlanarDomain::star({0, 0}, [](double t) { return 0.5 + 0.15 * std::cos(3 * t); });
  const GridMap2D s = volume_embed(star, 1.05 * star.area(), opt);
  std::printf("star of area %.4f -> disc of area %.4f: branch %s, |det - 1| <= %.2e\n", star.area(),
              1.05 * star.area(), s.branch.c_str(), s.max_jacobian_deviation());
  return 0;
}
