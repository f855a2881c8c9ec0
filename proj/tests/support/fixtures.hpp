#pragma once

#include "fql/instance.hpp"
#include "fql/relenc.hpp"
#include "fql/signature.hpp"

namespace fql::testing {

// Employees/departments world: Emp with a manager loop and worksIn, Dept
// with a secretary, the two path equations tying them together, and
// FName/LName/DName attributes.
struct EmployeesFixture {
  SigPtr sig;
  Instance good;       // satisfies both equations
  Instance breaking;   // fails one equation at Emp 101 and one at Dept x02
};
EmployeesFixture employees();

// Column-splitting world: C has N1 (Name, Salary) and N2 (Age) with no
// edges, D a single N carrying all three; F merges N1 and N2 into N.
struct SplitFixture {
  SigPtr C;
  SigPtr D;
  TypedSignatureMorphism F;  // C -> D
  Instance J;                // on D: Bob/Sue/Alice with ages and salaries
  Instance I;                // on C: the split of J
};
SplitFixture split_merge();

// Union-compatible world: three a-tables with two link columns each, fibred
// over a single A --G--> B, A --H--> C pattern, plus the instance whose
// pushforward is checked row for row.
struct AbcFixture {
  SigPtr C;
  SigPtr D;
  TypedSignatureMorphism F;  // C -> D, unique-edge-lifting
  Instance I;                // on C
};
AbcFixture abc_union();

SigPtr point_sig();                    // one node s
SigPtr loop_sig();                     // one node s with f : s -> s
TypedSignatureMorphism point_to_loop();
SigPtr chain_sig(int n);               // v0 -> v1 -> ... -> vn

// Two-column relation R = {(x,y),(x,z)} over strings.
RelationalInstance two_column_r();

}  // namespace fql::testing
