#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pdil/bcl.hpp"

using namespace pdil;

namespace {

CMat mat2(cplx a, cplx b, cplx c, cplx d) {
  CMat m(2, 2);
  m << a, b, c, d;
  return m;
}

CMat swap2() { return mat2(0, 1, 1, 0); }

BCLTriple identity_triple(Index d1, Index d2) {
  return BCLTriple{d1, d2, identity(d1 + d2), second_summand_projection(d1, d2)};
}

CommutingPair shift_pair() { return truncated_shift_pair(2, 1, 1); }

std::vector<CommutingPair> corpus(int count) {
  std::vector<CommutingPair> out;
  for (int i = 0; i < count; ++i)
    out.push_back(random_commuting_pure_pair(2000 + i, 2 + i % 7, 0.9));
  return out;
}

cplx random_disc_point(std::mt19937_64& rng, double r_max = 0.95) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return std::polar(r_max * std::sqrt(u(rng)), 2.0 * M_PI * u(rng));
}

}  // namespace

TEST(BuildTriple, ShiftPairGivesSwap) {
  const BCLTriple t = build_complete_bcl_triple(shift_pair());
  EXPECT_EQ(t.d1, 1);
  EXPECT_EQ(t.d2, 1);
  EXPECT_LT((t.u - swap2()).norm(), 1e-15);
  EXPECT_LT((t.p - mat2(0, 0, 0, 1)).norm(), 1e-15);
}

TEST(BuildTriple, ZeroPairGivesSwap) {
  const CommutingPair z = make_commuting_pair(CMat::Zero(1, 1), CMat::Zero(1, 1));
  std::vector<std::string> log;
  const BCLTriple t = build_complete_bcl_triple(z, {}, &log);
  EXPECT_EQ(t.e_dim(), 2);
  EXPECT_LT((t.u - swap2()).norm(), 1e-15);
  EXPECT_FALSE(log.empty());
}

TEST(BuildTriple, UnitarySecondFactorEmptiesSecondSummand) {
  std::mt19937_64 rng(3);
  CMat t1 = CMat::Zero(2, 2);
  t1(0, 0) = 0.5;
  t1(1, 1) = -0.3;
  CMat t2 = CMat::Zero(2, 2);
  t2(0, 0) = std::polar(1.0, 0.4);
  t2(1, 1) = std::polar(1.0, -1.1);
  const BCLTriple t = build_complete_bcl_triple(make_commuting_pair(t1, t2));
  EXPECT_EQ(t.d2, 0);
  EXPECT_EQ(t.d1, 2);
  EXPECT_LE(unitarity_residual(t.u), 1e-12);
  EXPECT_NO_THROW(validate_triple(t));
}

TEST(BuildTriple, Deterministic) {
  const CommutingPair p = random_commuting_pure_pair(12, 5, 0.9);
  const BCLTriple a = build_complete_bcl_triple(p);
  const BCLTriple b = build_complete_bcl_triple(p);
  EXPECT_TRUE(a.u == b.u);
}

TEST(BuildTriple, CorpusSatisfiesRelations) {
  for (const CommutingPair& p : corpus(25)) {
    const BCLTriple t = build_complete_bcl_triple(p);
    EXPECT_LE(unitarity_residual(t.u), 1e-8);
    EXPECT_EQ(t.d1, p.t1.codefect_basis.dim());
    EXPECT_EQ(t.d2, p.t2.codefect_basis.dim());
    const RelationReport r = verify_unitary_relations(t, p);
    EXPECT_EQ(r.residuals.size(), 4u);
    EXPECT_LE(r.max_residual, 1e-8);
    EXPECT_FALSE(r.flagged);
  }
}

TEST(ValidateTriple, RejectsBadInput) {
  BCLTriple t = identity_triple(1, 1);
  EXPECT_NO_THROW(validate_triple(t));
  t.u(0, 0) = 2.0;
  EXPECT_THROW(validate_triple(t), Error);
  t = identity_triple(1, 1);
  t.p = mat2(1, 0, 0, 0);
  EXPECT_THROW(validate_triple(t), Error);
  t = identity_triple(1, 1);
  t.d2 = 2;
  EXPECT_THROW(validate_triple(t), Error);
}

TEST(Symbols, SwapTriple) {
  const BclSymbols s = bcl_symbols(build_complete_bcl_triple(shift_pair()));
  const cplx z(0.3, -0.2);
  EXPECT_LT((s.phi(z) - mat2(0, z, 1, 0)).norm(), 1e-15);
  EXPECT_LT((s.psi(z) - mat2(0, z, 1, 0)).norm(), 1e-15);
  EXPECT_LT((s.phi(z) * s.psi(z) - z * identity(2)).norm(), 1e-15);
  EXPECT_LT(s.product_residual, 1e-15);
}

TEST(Symbols, IdentityUnitaryFollowsFormula) {
  // Φ(z) = (P + zP⊥)U*, Ψ(z) = U(P⊥ + zP).
  const cplx z(0.1, 0.7);
  const BclSymbols none = bcl_symbols(identity_triple(2, 0));
  EXPECT_LT((none.phi(z) - z * identity(2)).norm(), 1e-15);
  EXPECT_LT((none.psi(z) - identity(2)).norm(), 1e-15);
  const BclSymbols all = bcl_symbols(identity_triple(0, 2));
  EXPECT_LT((all.phi(z) - identity(2)).norm(), 1e-15);
  EXPECT_LT((all.psi(z) - z * identity(2)).norm(), 1e-15);
}

TEST(Symbols, ProductIdentityAndContractivity) {
  std::mt19937_64 rng(6);
  for (const CommutingPair& p : corpus(15)) {
    const BclSymbols s = bcl_symbols(build_complete_bcl_triple(p));
    EXPECT_LE(s.product_residual, 1e-8);
    EXPECT_LE(sampled_sup_norm(s.phi), 1.0 + 1e-8);
    EXPECT_LE(sampled_sup_norm(s.psi), 1.0 + 1e-8);
    for (int k = 0; k < 5; ++k) {
      const cplx z = random_disc_point(rng, 1.0);
      const Index d = s.phi.dim();
      EXPECT_LE(operator_norm(s.psi(z) * s.phi(z) - z * identity(d)), 1e-8);
    }
  }
}

TEST(Blocks, SwapAndIdentity) {
  const BlockDecomposition b = block_decomposition(build_complete_bcl_triple(shift_pair()));
  EXPECT_LT(std::abs(b.a(0, 0)), 1e-15);
  EXPECT_LT(std::abs(b.b(0, 0) - 1.0), 1e-15);
  EXPECT_LT(std::abs(b.c(0, 0) - 1.0), 1e-15);
  EXPECT_LT(std::abs(b.d(0, 0)), 1e-15);
  const BlockDecomposition i = block_decomposition(identity_triple(2, 3));
  EXPECT_TRUE(i.a == identity(2));
  EXPECT_TRUE(i.d == identity(3));
  EXPECT_EQ(i.b.norm(), 0.0);
  EXPECT_EQ(i.c.norm(), 0.0);
}

TEST(Blocks, UnitarityBlockIdentities) {
  for (const CommutingPair& p : corpus(15)) {
    const BCLTriple t = build_complete_bcl_triple(p);
    const BlockDecomposition b = block_decomposition(t);
    EXPECT_LE((b.assemble() - t.u).norm(), 1e-14);
    EXPECT_LE(operator_norm(b.c * b.a.adjoint() + b.d * b.b.adjoint()), 1e-8);
    EXPECT_LE(operator_norm(b.a.adjoint() * b.a + b.c.adjoint() * b.c - identity(t.d1)), 1e-8);
    EXPECT_LE(operator_norm(b.b.adjoint() * b.b + b.d.adjoint() * b.d - identity(t.d2)), 1e-8);
    const auto [a, dstar] = fringe_compressions(t);
    EXPECT_TRUE(a == b.a);
    EXPECT_TRUE(dstar == CMat(b.d.adjoint()));
  }
}

TEST(Relations, ShiftPairExact) {
  const CommutingPair p = shift_pair();
  const RelationReport r = verify_unitary_relations(build_complete_bcl_triple(p), p);
  EXPECT_LT(r.max_residual, 1e-15);
}

TEST(Relations, IdentityUnitaryNegativeControl) {
  const CommutingPair p = random_commuting_pure_pair(77, 4, 0.9);
  const BCLTriple built = build_complete_bcl_triple(p);
  const BCLTriple bad = identity_triple(built.d1, built.d2);
  const RelationReport r = verify_unitary_relations(bad, p);
  // Oracle: with U = I the first relation becomes Q1* D1 (I - T2*) = 0.
  const DefectCoordinates dc = defect_coordinates(p);
  double direct = 0.0;
  for (Index j = 0; j < p.dim(); ++j)
    direct = std::max(direct, (dc.d1_h.col(j) - dc.d1_t2.col(j)).norm());
  EXPECT_GT(r.max_residual, 0.1);
  EXPECT_GE(r.max_residual, direct - 1e-12);
  EXPECT_TRUE(r.flagged);
}

TEST(Relations, DimensionMismatchThrows) {
  const CommutingPair p = random_commuting_pure_pair(5, 3, 0.9);
  try {
    verify_unitary_relations(identity_triple(1, 1), p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TripleMismatch);
  }
}

TEST(Recurrence, BaseCaseMatchesRelations) {
  for (const CommutingPair& p : corpus(10)) {
    const BCLTriple t = build_complete_bcl_triple(p);
    const RecurrenceReport r = verify_recurrence(t, p, 10);
    ASSERT_EQ(r.a_side.size(), 10u);
    ASSERT_EQ(r.d_side.size(), 10u);
    EXPECT_LE(r.max_residual, 1e-8);
    EXPECT_FALSE(r.flagged);
    const RelationReport rel = verify_unitary_relations(t, p);
    EXPECT_LE(r.a_side[0], rel.max_residual + 1e-14);
    EXPECT_LE(r.d_side[0], rel.max_residual + 1e-14);
  }
}

TEST(Recurrence, ShiftPairSecondOrder) {
  const CommutingPair p = shift_pair();
  const RecurrenceReport r = verify_recurrence(build_complete_bcl_triple(p), p, 2);
  EXPECT_LT(r.a_side[1], 1e-15);
  EXPECT_LT(r.d_side[1], 1e-15);
}

TEST(Recurrence, WrongTripleFlagged) {
  const CommutingPair p = random_commuting_pure_pair(77, 4, 0.9);
  const BCLTriple built = build_complete_bcl_triple(p);
  const RecurrenceReport r = verify_recurrence(identity_triple(built.d1, built.d2), p, 3);
  EXPECT_TRUE(r.flagged);
}

TEST(Transfer, SwapIsIdentityFunction) {
  const BlockDecomposition b = block_decomposition(build_complete_bcl_triple(shift_pair()));
  for (cplx z : {cplx(0.3, 0), cplx(-0.5, 0.5), cplx(0, 0)}) {
    const TransferValue v = transfer_function(b, z);
    EXPECT_LT(std::abs(v.tau(0, 0) - z), 1e-15);
    EXPECT_LT(v.isometry_residual, 1e-15);
  }
}

TEST(Transfer, ConstantCases) {
  const CommutingPair p = random_commuting_pure_pair(9, 4, 0.9);
  BlockDecomposition b = block_decomposition(build_complete_bcl_triple(p));
  EXPECT_LT((transfer_function(b, 0.0).tau - b.a).norm(), 1e-15);
  b.c.setZero();
  EXPECT_LT((transfer_function(b, cplx(0.4, 0.3)).tau - b.a).norm(), 1e-15);
}

TEST(Transfer, Errors) {
  const BlockDecomposition b = block_decomposition(build_complete_bcl_triple(shift_pair()));
  try {
    transfer_function(b, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
  }
  BlockDecomposition s = b;
  s.d(0, 0) = 2.0;
  try {
    transfer_function(s, 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NearSingularResolvent);
  }
}

TEST(Transfer, IsometryIdentityAndCnu) {
  std::mt19937_64 rng(15);
  for (const CommutingPair& p : corpus(12)) {
    const BCLTriple t = build_complete_bcl_triple(p);
    const BlockDecomposition b = block_decomposition(t);
    const bool a_cnc = certify_cnc(b.a);
    for (int k = 0; k < 20; ++k) {
      const cplx z = random_disc_point(rng);
      const TransferValue v = transfer_function(b, z);
      EXPECT_LE(v.isometry_residual, 1e-10);
      // Oracle: direct evaluation of the state-space formula.
      if (t.d2 > 0) {
        const CMat res = (identity(t.d2) - z * b.d).inverse();
        EXPECT_LE((v.tau - (b.a + z * b.b * res * b.c)).norm(), 1e-10);
      }
      if (a_cnc) EXPECT_TRUE(certify_cnu(v.tau));
    }
  }
}

TEST(BclPurity, SwapAndIdentity) {
  const BCLTriple swap = build_complete_bcl_triple(shift_pair());
  const BclPurity s = certify_bcl_pure(swap);
  EXPECT_TRUE(s.both_pure());
  EXPECT_NEAR(s.a_block.spectral_radius, 0.0, 1e-15);
  const auto [sa, sd] = fringe_compressions(swap);
  EXPECT_LT(sa.norm() + sd.norm(), 1e-15);
  EXPECT_EQ(certify_cnc_blocks(swap), std::make_pair(true, true));

  const BCLTriple id = identity_triple(1, 1);
  const BclPurity i = certify_bcl_pure(id);
  EXPECT_EQ(i.a_block.verdict, Purity::NotPure);
  EXPECT_EQ(i.d_star_block.verdict, Purity::NotPure);
  const auto [ia, id_] = fringe_compressions(id);
  EXPECT_NEAR(ia(0, 0).real(), 1.0, 1e-15);
  EXPECT_NEAR(id_(0, 0).real(), 1.0, 1e-15);
  EXPECT_EQ(certify_cnc_blocks(id), std::make_pair(false, false));
}

TEST(BclPurity, CorpusIsPureCncAndWandering) {
  for (const CommutingPair& p : corpus(20)) {
    const BCLTriple t = build_complete_bcl_triple(p);
    const BclPurity bp = certify_bcl_pure(t);
    EXPECT_TRUE(bp.both_pure());
    EXPECT_LE(bp.a_block.spectral_radius, 1.0 - 1e-9);
    EXPECT_LE(bp.d_star_block.spectral_radius, 1.0 - 1e-9);
    EXPECT_EQ(certify_cnc_blocks(t), std::make_pair(true, true));
    const WanderingReport w = wandering_check_symbols(t);
    EXPECT_TRUE(w.phi);
    EXPECT_TRUE(w.psi);
    EXPECT_EQ(w.phi_rank, t.e_dim());
    EXPECT_EQ(w.psi_rank, t.e_dim());
    EXPECT_LE(w.phi_partial_isometry, 1e-8);
  }
}

TEST(Wandering, SwapAndIdentity) {
  const WanderingReport s = wandering_check_symbols(build_complete_bcl_triple(shift_pair()));
  EXPECT_TRUE(s.phi && s.psi);
  EXPECT_EQ(s.phi_rank, 2);
  // U = I, P = 0: Ψ(0) = I has trivial cokernel.
  const WanderingReport i = wandering_check_symbols(BCLTriple{2, 0, identity(2), CMat::Zero(2, 2)});
  EXPECT_FALSE(i.psi);
  EXPECT_EQ(i.psi_rank, 0);
  const WanderingReport j = wandering_check_symbols(BCLTriple{0, 2, identity(2), identity(2)});
  EXPECT_FALSE(j.phi);
  EXPECT_EQ(j.phi_rank, 0);
}

TEST(Wandering, ShiftPairsQualify) {
  for (Index n = 2; n <= 6; ++n)
    for (int a = 1; a < n; ++a)
      for (int b = 1; b < n; ++b) {
        const CommutingPair p = truncated_shift_pair(n, a, b);
        const BCLTriple t = build_complete_bcl_triple(p);
        EXPECT_LE(verify_unitary_relations(t, p).max_residual, 1e-8);
        EXPECT_EQ(certify_cnc_blocks(t), std::make_pair(true, true));
        const WanderingReport w = wandering_check_symbols(t);
        EXPECT_TRUE(w.phi && w.psi) << n << " " << a << " " << b;
        EXPECT_LE(kernel_decay(t, p, static_cast<int>(60 * t.d1)), 1e-6);
      }
}

TEST(Offdiagonal, ShiftAndSymmetricPairs) {
  const BCLTriple s = build_offdiagonal_triple(shift_pair());
  const BlockDecomposition sb = block_decomposition(s);
  EXPECT_EQ(sb.a.norm(), 0.0);
  EXPECT_EQ(sb.d.norm(), 0.0);
  EXPECT_TRUE(certify_bcl_pure(s).both_pure());

  std::mt19937_64 rng(21);
  for (int k = 0; k < 10; ++k) {
    const Index n = 2 + k % 5;
    CMat t = oracle::random_matrix(rng, n, n);
    t *= 0.9 / oracle::norm_power_iteration(t);
    const CommutingPair p = make_commuting_pair(t, t);
    const BCLTriple w = build_offdiagonal_triple(p);
    const BlockDecomposition b = block_decomposition(w);
    EXPECT_EQ(b.a.norm(), 0.0);
    EXPECT_EQ(b.d.norm(), 0.0);
    EXPECT_LE(unitarity_residual(w.u), 1e-8);
    EXPECT_LE(verify_unitary_relations(w, p).max_residual, 1e-8);
    EXPECT_TRUE(certify_bcl_pure(w).both_pure());
  }
}

TEST(Offdiagonal, RejectsUnequalDefects) {
  CMat a = CMat::Zero(2, 2), b = CMat::Zero(2, 2);
  a.diagonal().setConstant(0.5);
  b.diagonal().setConstant(0.3);
  try {
    build_offdiagonal_triple(make_commuting_pair(a, b));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::HypothesisViolated);
  }
}
