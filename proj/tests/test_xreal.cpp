#include <doctest.h>

#include <sstream>
#include <vector>

#include "safe_explore/xreal.hpp"

using safe_explore::XReal;

TEST_CASE("xreal addition absorbs -inf") {
  const XReal ninf = XReal::neg_inf();
  CHECK((XReal(2.5) + XReal(1.5)) == XReal(4.0));
  CHECK((ninf + XReal(1e300)).is_neg_inf());
  CHECK((XReal(0.0) + ninf).is_neg_inf());
  CHECK((ninf + ninf).is_neg_inf());
}

TEST_CASE("xreal max prefers the finite operand") {
  const XReal ninf = XReal::neg_inf();
  CHECK(max(ninf, XReal(-7.0)) == XReal(-7.0));
  CHECK(max(XReal(3.0), ninf) == XReal(3.0));
  CHECK(max(ninf, ninf).is_neg_inf());
  std::vector<XReal> xs{ninf, XReal(1.0), XReal(-2.0)};
  CHECK(safe_explore::max_of(xs) == XReal(1.0));
  CHECK(safe_explore::max_of(std::vector<XReal>{}).is_neg_inf());
}

TEST_CASE("xreal scaling") {
  CHECK((0.5 * XReal(4.0)) == XReal(2.0));
  CHECK((0.5 * XReal::neg_inf()).is_neg_inf());
  CHECK((0.0 * XReal::neg_inf()) == XReal(0.0));
  CHECK_THROWS(-1.0 * XReal(1.0));
}

TEST_CASE("xreal ordering and equality") {
  const XReal ninf = XReal::neg_inf();
  CHECK(ninf < XReal(-1e308));
  CHECK(ninf == XReal::neg_inf());
  CHECK(ninf != XReal(0.0));
  CHECK(XReal(1.0) > XReal(0.5));
}

TEST_CASE("xreal value() rejects -inf") {
  CHECK(XReal(3.0).value() == 3.0);
  CHECK_THROWS(XReal::neg_inf().value());
}

TEST_CASE("barrier index") {
  CHECK(safe_explore::barrier_index(0) == XReal(0.0));
  CHECK(safe_explore::barrier_index(1).is_neg_inf());
}

TEST_CASE("xreal text round trip") {
  for (XReal x : {XReal(0.1), XReal(-3.0), XReal(1e-300), XReal::neg_inf()}) {
    CHECK(XReal::parse(x.to_string()) == x);
  }
  CHECK(XReal::neg_inf().to_string() == "-inf");
  std::ostringstream os;
  os << XReal(2.5);
  CHECK(os.str() == "2.5");
  CHECK_THROWS(XReal::parse("abc"));
}
