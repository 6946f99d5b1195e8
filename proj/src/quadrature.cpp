#include "crnlyap/quadrature.hpp"

namespace crnlyap::detail {

const GaussLegendre16& gauss_legendre_16() {
  static const GaussLegendre16 rule{
      {-0.9894009349916499326, -0.94457502307323257608, -0.86563120238783174388, -0.7554044083550030339, -0.61787624440264374845, -0.45801677765722738634, -0.28160355077925891323, -0.095012509837637440185, 0.095012509837637440185, 0.28160355077925891323, 0.45801677765722738634, 0.61787624440264374845, 0.7554044083550030339, 0.86563120238783174388, 0.94457502307323257608, 0.9894009349916499326},
      {0.027152459411754094852, 0.062253523938647892863, 0.09515851168249278481, 0.12462897125553387205, 0.14959598881657673208, 0.16915651939500253819, 0.18260341504492358887, 0.18945061045506849629, 0.18945061045506849629, 0.18260341504492358887, 0.16915651939500253819, 0.14959598881657673208, 0.12462897125553387205, 0.09515851168249278481, 0.062253523938647892863, 0.027152459411754094852}};
  return rule;
}

}  // namespace crnlyap::detail
