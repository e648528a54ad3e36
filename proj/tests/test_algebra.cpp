#include <doctest.h>

#include <random>

#include "tate/algebra.hpp"
#include "testutil.hpp"

using namespace tate;

TEST_CASE("group algebra C2") {
    auto a = group_algebra(2, cyclic_table(2), "O[C2]");
    CHECK(validate_algebra(*a).ok());
    CHECK(a->n == 2);
    auto f = group_form(*a);
    CHECK(validate_form(*a, f).ok());
    auto fd = make_form_data(*a, f);
    // 1^dual = 1, g^dual = g
    CHECK(fd.gram_inv.col(0) == Mat::unit_vec(2, 0));
    CHECK(fd.gram_inv.col(1) == Mat::unit_vec(2, 1));
    // z = 2 * 1_A
    CHECK(fd.z == a->unit * Rat(2));
}

TEST_CASE("perturbed structure constants are rejected") {
    auto a = group_algebra(3, cyclic_table(3));
    std::vector<std::vector<Mat>> structure(3, std::vector<Mat>(3));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) structure[i][j] = a->lmul[i].col(j);
    structure[1][2] = Mat::unit_vec(3, 1);  // g g^2 = g instead of 1
    auto bad = algebra_from_structure(3, structure, a->unit);
    auto rep = validate_algebra(*bad);
    CHECK(!rep.ok());
    bool names_pair = false;
    for (const auto& s : rep.issues)
        if (s.find("(") != std::string::npos) names_pair = true;
    CHECK(names_pair);
}

TEST_CASE("degenerate form rejected") {
    auto a = group_algebra(2, cyclic_table(2));
    Form f{Mat::unit_vec(2, 0) * Rat(2)};
    auto rep = validate_form(*a, f);
    CHECK(!rep.ok());
}

TEST_CASE("non-symmetric form rejected") {
    auto a = matrix_algebra(2, 2);
    Form f{Mat::unit_vec(4, 1)};  // s(E_01) = 1, not a trace-like form
    CHECK(!validate_form(*a, f).ok());
}

TEST_CASE("matrix algebra") {
    for (int d : {1, 2, 3}) {
        auto a = matrix_algebra(5, d);
        CHECK(a->n == d * d);
        CHECK(validate_algebra(*a).ok());
        auto f = matrix_trace_form(*a);
        CHECK(validate_form(*a, f).ok());
        auto fd = make_form_data(*a, f);
        // z = d * identity
        CHECK(fd.z == a->unit * Rat(d));
        // trace-form Gram is a permutation matrix
        for (int i = 0; i < a->n; ++i) {
            int nnz = 0;
            for (int j = 0; j < a->n; ++j)
                if (fd.gram.at(i, j) != 0) ++nnz;
            CHECK(nnz == 1);
        }
        // (E_ij)^dual = E_ji
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                CHECK(fd.gram_inv.col(i * d + j) == Mat::unit_vec(d * d, j * d + i));
    }
}

TEST_CASE("S3 group algebra") {
    auto a = group_algebra(3, s3_table(), "O[S3]");
    CHECK(a->n == 6);
    CHECK(validate_algebra(*a).ok());
    auto fd = make_form_data(*a, group_form(*a));
    CHECK(fd.z == a->unit * Rat(6));
    CHECK(a->gens.size() <= 2);
}

TEST_CASE("dual basis defining property on assorted algebras") {
    std::mt19937_64 rng(5);
    auto check_alg = [&](const AlgebraPtr& a, const Form& f) {
        auto fd = make_form_data(*a, f);
        auto d = dual_basis(*a, fd);
        for (int i = 0; i < a->n; ++i)
            for (int j = 0; j < a->n; ++j) {
                Rat v = (f.s.transpose() * a->mul(Mat::unit_vec(a->n, i), d[j])).at(0, 0);
                CHECK(v == Rat(i == j ? 1 : 0));
            }
    };
    check_alg(group_algebra(2, cyclic_table(2)), group_form(*group_algebra(2, cyclic_table(2))));
    check_alg(matrix_algebra(2, 3), matrix_trace_form(*matrix_algebra(2, 3)));
    auto s3 = group_algebra(3, s3_table());
    check_alg(s3, group_form(*s3));
}

TEST_CASE("z is central and basis independent") {
    std::mt19937_64 rng(9);
    auto a = group_algebra(3, s3_table());
    auto fd = make_form_data(*a, group_form(*a));
    Mat zc = center(*a);
    CHECK(lattice_contains(zc, fd.z, a->p));
    for (int i = 0; i < a->n; ++i)
        CHECK(a->mul(Mat::unit_vec(a->n, i), fd.z) == a->mul(fd.z, Mat::unit_vec(a->n, i)));

    // recompute z under a random unimodular basis change
    for (int t = 0; t < 5; ++t) {
        Mat u = random_unimodular(rng, a->n, a->p);
        Mat uinv = invert(u);
        std::vector<std::vector<Mat>> structure(a->n, std::vector<Mat>(a->n));
        for (int i = 0; i < a->n; ++i)
            for (int j = 0; j < a->n; ++j)
                structure[i][j] = uinv * a->mul(u.col(i), u.col(j));
        auto b = algebra_from_structure(a->p, structure, uinv * a->unit);
        REQUIRE(validate_algebra(*b).ok());
        Form fb{u.transpose() * group_form(*a).s};
        auto fdb = make_form_data(*b, fb);
        CHECK(u * fdb.z == fd.z);
    }
}

TEST_CASE("rescaling the form rescales z inversely") {
    std::mt19937_64 rng(13);
    auto a = group_algebra(2, cyclic_table(2));
    auto fd = make_form_data(*a, group_form(*a));
    for (const Rat& lambda : {Rat(3), Rat(1, 5), Rat(7, 3)}) {
        auto fd2 = make_form_data(*a, scale_form(group_form(*a), lambda));
        CHECK(fd2.z == fd.z * (1 / lambda));
    }
}

TEST_CASE("relative projective elements of constructions") {
    auto a = group_algebra(3, cyclic_table(3), "O[C3]");
    auto b = group_algebra(3, s3_table(), "O[S3]");
    auto fa = group_form(*a);
    auto fb = group_form(*b);
    auto za = make_form_data(*a, fa).z;
    auto zb = make_form_data(*b, fb).z;

    // z_{A^op} = z_A
    auto aop = opposite(a);
    CHECK(make_form_data(*aop, opposite_form(fa)).z == za);

    // z_{A(x)B} = z_A (x) z_B
    auto t = tensor_algebra(a, b);
    CHECK(validate_algebra(*t).ok());
    CHECK(make_form_data(*t, tensor_form(fa, fb)).z == kron(za, zb));

    // z_{AxB} = (z_A, z_B)
    auto d = direct_product(a, b);
    CHECK(validate_algebra(*d).ok());
    CHECK(make_form_data(*d, product_form(fa, fb)).z == vcat(za, zb));
}

TEST_CASE("enveloping algebra") {
    auto a = group_algebra(2, cyclic_table(2));
    auto e = enveloping(a);
    CHECK(e->n == 4);
    CHECK(validate_algebra(*e).ok());
    auto fd = make_form_data(*a, group_form(*a));
    auto fde = make_form_data(*e, tensor_form(group_form(*a), group_form(*a)));
    CHECK(fde.z == kron(fd.z, fd.z));
}

TEST_CASE("semisimplicity over K") {
    CHECK(check_K_semisimple(*group_algebra(2, cyclic_table(2))));
    CHECK(check_K_semisimple(*group_algebra(3, s3_table())));
    CHECK(check_K_semisimple(*matrix_algebra(2, 2)));
    CHECK(check_K_semisimple(*enveloping(group_algebra(3, s3_table()))));

    // 2-dimensional algebra with x^2 = 0 is not semisimple
    std::vector<std::vector<Mat>> structure(2, std::vector<Mat>(2));
    structure[0][0] = Mat::unit_vec(2, 0);
    structure[0][1] = Mat::unit_vec(2, 1);
    structure[1][0] = Mat::unit_vec(2, 1);
    structure[1][1] = Mat(2, 1);
    auto nil = algebra_from_structure(2, structure, Mat::unit_vec(2, 0));
    REQUIRE(validate_algebra(*nil).ok());
    CHECK(!check_K_semisimple(*nil));
}

TEST_CASE("mixed primes rejected") {
    auto a = group_algebra(2, cyclic_table(2));
    auto b = group_algebra(3, cyclic_table(3));
    CHECK_THROWS_AS(tensor_algebra(a, b), error);
    CHECK_THROWS_AS(direct_product(a, b), error);
}

TEST_CASE("bad group tables rejected") {
    CHECK_THROWS_AS(group_algebra(2, {{0, 1}, {1, 1}}), error);        // not a permutation
    CHECK_THROWS_AS(group_algebra(2, {{1, 0}, {0, 1}}), error);        // 0 not identity
    std::vector<std::vector<int>> bad5{{0, 1, 2, 3, 4}, {1, 2, 0, 4, 3}, {2, 0, 1, 3, 4},
                                       {3, 4, 0, 0, 1}, {4, 3, 1, 2, 0}};
    CHECK_THROWS_AS(group_algebra(2, bad5), error);
}
