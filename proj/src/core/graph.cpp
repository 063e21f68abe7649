#include "lle/core/graph.hpp"

namespace lle {

template class Graph<float>;
template class Graph<double>;

}  // namespace lle
