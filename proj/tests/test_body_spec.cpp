#include <doctest.h>

#include <stdexcept>
#include <string>

#include "rpl/body_spec.hpp"

using namespace rpl;

namespace {

std::string error_of(const std::string& spec) {
  try {
    make_body(spec);
  } catch (const std::invalid_argument& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("body string examples") {
  const ConvexBody sq = make_body("square:side=10");
  CHECK(sq.size() == 4);
  CHECK(sq.area() == 100.0);

  const ConvexBody disk = make_body("disk:area=3.141592653589793,k=4096");
  CHECK(disk.size() == 4096);
  CHECK(disk.area() == doctest::Approx(kPi).epsilon(1e-12));
  CHECK(norm(disk.vertex(17)) == doctest::Approx(1.0).epsilon(1e-6));

  const ConvexBody a = make_body("random:k=20,seed=7,area=300");
  const ConvexBody b = make_body("random:k=20,seed=7,area=300");
  CHECK(a.vertices() == b.vertices());
  CHECK(a.area() == doctest::Approx(300.0).epsilon(1e-12));
  CHECK(make_body("random:k=20,seed=8,area=300").vertices() != a.vertices());
}

TEST_CASE("every kind hits its requested area") {
  for (const char* s : {"square:area=37", "ngon:k=7,area=12.5", "ellipse:ratio=3,area=1000,k=512",
                        "triangle:ax=0,ay=0,bx=0,by=3,cx=2,cy=0,area=9", "triangle:leg=4",
                        "random:k=33,seed=1,area=2000"}) {
    const BodySpec spec = parse_body_spec(s);
    const ConvexBody k = make_body(spec);
    const double expected = spec.has("area") ? spec.get("area", 0) : 8.0;
    CHECK(k.area() == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("parse and print round trip") {
  const BodySpec s = parse_body_spec(" disk : area=1e4 , k=64 ");
  CHECK(s.kind == "disk");
  CHECK(s.get("area", 0) == 1e4);
  CHECK(to_string(s) == "disk:area=10000,k=64");
  CHECK(to_string(with_scale(parse_body_spec("square:side=3"), 7)) == "square:side=7");
  CHECK(to_string(with_scale(parse_body_spec("square:area=3"), 7)) == "square:side=7");
  CHECK(to_string(with_scale(parse_body_spec("disk:k=128"), 50)) == "disk:area=50,k=128");
}

TEST_CASE("errors name the offending parameter") {
  CHECK(error_of("disk:area=-1").find("'area'") != std::string::npos);
  CHECK(error_of("disk:k=2,area=5").find("'k'") != std::string::npos);
  CHECK(error_of("square:side=0").find("'side'") != std::string::npos);
  CHECK(error_of("square:side=1,area=1").find("side") != std::string::npos);
  CHECK(error_of("disk:radius=3").find("'radius'") != std::string::npos);
  CHECK(error_of("disk:area=abc").find("'area'") != std::string::npos);
  CHECK(error_of("random:k=5,area=10").find("'seed'") != std::string::npos);
  CHECK(error_of("blob:area=3").find("blob") != std::string::npos);
  CHECK(error_of("disk:area=3,area=4").find("'area'") != std::string::npos);
  CHECK(error_of("triangle:ax=0,ay=0,bx=1,by=1,cx=2,cy=2").find("collinear") != std::string::npos);
}
