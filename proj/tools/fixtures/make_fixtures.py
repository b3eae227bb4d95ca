#!/usr/bin/env python3
"""Writes the bundled dataset, the scripted-model rules and the mock checker
rules for the three fixture problems.

The rules are the readable source of the fixture set. Hashed replay files
under fixtures/providers/ are recorded from them with record_fixtures.sh.
"""

import json
import pathlib

ROOT = pathlib.Path(__file__).resolve().parents[2]

PROB = ("{Ω : Type*} [MeasurableSpace Ω] (μ : MeasureTheory.Measure Ω) "
        "[MeasureTheory.IsProbabilityMeasure μ]")
UNION = "(μ (A ∪ B)).toReal"
INTER = "(μ (A ∩ B)).toReal"
PA = "(μ A).toReal"
PB = "(μ B).toReal"
SUM = f"{PA} + {PB} - {INTER}"
ARITH = "(∃ d : ℝ, ∀ n : ℕ, a (n + 1) = a n + d) ∧ a 1 = 5"
CLOSED = "∀ n : ℕ, 1 ≤ n → a n = a 1 + (n - 1) * d"


def node(id, kind, original, self_contained, deps, lean=None, proof=None, **extra):
    n = {"id": id, "kind": kind, "nl_original": original, "nl_self_contained": self_contained,
         "deps": deps, "lean": lean, "proof": proof}
    n.update(extra)
    return n


PROBLEMS = [
    {
        "id": "dummy_6",
        "area": "number_theory_algebra",
        "theorem": r"If $n$ is an odd integer, then $n^2 \equiv 1 \pmod{8}$.",
        "proof": (r"Since $n$ is odd, we can write $n = 2k + 1$ for some integer $k$. Then $n^2 = (2k + 1)^2 = "
                  r"4k^2 + 4k + 1$. We can factor this as $n^2 = 4k(k + 1) + 1$. Now, either $k$ is even or $k$ "
                  r"is odd. If $k$ is even, then $k + 1$ is odd, and if $k$ is odd, then $k + 1$ is even. In "
                  r"either case, $k(k + 1)$ is even, so $k(k + 1) = 2m$ for some integer $m$. Therefore $n^2 = "
                  r"4(2m) + 1 = 8m + 1$, which means $n^2 \equiv 1 \pmod{8}$."),
        "steps": [
            r"Since $n$ is odd, we can write $n = 2k + 1$ for some integer $k$.",
            r"Then $n^2 = (2k + 1)^2 = 4k^2 + 4k + 1$.",
            r"We can factor this as $n^2 = 4k(k + 1) + 1$.",
            r"Now, either $k$ is even or $k$ is odd. If $k$ is even, then $k + 1$ is odd, and if $k$ is odd, "
            r"then $k + 1$ is even.",
            r"In either case, $k(k + 1)$ is even, so $k(k + 1) = 2m$ for some integer $m$.",
            r"Therefore $n^2 = 4(2m) + 1 = 8m + 1$,",
            r"which means $n^2 \equiv 1 \pmod{8}$.",
        ],
        "nodes": [
            node("TC1", "TC", r"$n$ is an odd integer", "n is an odd integer.", [],
                 "(n : ℤ) (h_TC1 : Odd n)"),
            node("L1", "L", r"Since $n$ is odd, we can write $n = 2k + 1$ for some integer $k$.",
                 "If n is an odd integer, then n = 2k + 1 for some integer k.", ["TC1"],
                 "theorem L1 (n : ℤ) (h_TC1 : Odd n) : ∃ k : ℤ, n = 2 * k + 1",
                 ["obtain ⟨k, hk⟩ := h_TC1", "exact ⟨k, hk⟩"]),
            node("L2", "L", r"Then $n^2 = (2k + 1)^2 = 4k^2 + 4k + 1$.",
                 "If n and k are integers with n = 2k + 1, then n^2 = 4k^2 + 4k + 1.", ["L1"],
                 "theorem L2 (n k : ℤ) (h_L1 : n = 2 * k + 1) : n ^ 2 = 4 * k ^ 2 + 4 * k + 1",
                 ["subst h_L1", "ring"]),
            node("L3", "L", r"We can factor this as $n^2 = 4k(k + 1) + 1$.",
                 "If n and k are integers with n^2 = 4k^2 + 4k + 1, then n^2 = 4k(k + 1) + 1.", ["L2"],
                 "theorem L3 (n k : ℤ) (h_L2 : n ^ 2 = 4 * k ^ 2 + 4 * k + 1) : n ^ 2 = 4 * k * (k + 1) + 1",
                 ["rw [h_L2]", "ring"],
                 # All previous steps on offer: the formalizer reaches back to L1 and L2 becomes redundant.
                 nodag_lean="theorem L3 (n k : ℤ) (h_L1 : n = 2 * k + 1) : n ^ 2 = 4 * k * (k + 1) + 1",
                 nodag_proof=["subst h_L1", "ring"]),
            node("L4", "L", r"Now, either $k$ is even or $k$ is odd.",
                 "If n and k are integers with n = 2k + 1, then k is even or k is odd.", ["L1"],
                 "theorem L4 (n k : ℤ) (h_L1 : n = 2 * k + 1) : Even k ∨ Odd k",
                 ["exact Int.even_or_odd k"]),
            node("L5", "L",
                 r"In either case, $k(k + 1)$ is even, so $k(k + 1) = 2m$ for some integer $m$.",
                 "If k is an integer that is even or odd, then k(k + 1) = 2m for some integer m.", ["L4"],
                 "theorem L5 (k : ℤ) (h_L4 : Even k ∨ Odd k) : ∃ m : ℤ, k * (k + 1) = 2 * m",
                 ["rcases h_L4 with ⟨j, hj⟩ | ⟨j, hj⟩",
                  "· exact ⟨j * (2 * j + 1), by subst hj; ring⟩",
                  "· exact ⟨(2 * j + 1) * (j + 1), by subst hj; ring⟩"],
                 first_try="theorem L5 (k : ℤ) (h_L4 : Even k ∨ Odd k) : Int.even_mul_pred k"),
            node("L6", "L", r"Therefore $n^2 = 4(2m) + 1 = 8m + 1$",
                 "If n, k and m are integers with n^2 = 4k(k + 1) + 1 and k(k + 1) = 2m, then n^2 = 8m + 1.",
                 ["L3", "L5"],
                 "theorem L6 (n k m : ℤ) (h_L3 : n ^ 2 = 4 * k * (k + 1) + 1) (h_L5 : k * (k + 1) = 2 * m) : "
                 "n ^ 2 = 8 * m + 1",
                 ["rw [h_L3, mul_assoc, h_L5]", "ring"]),
            node("TS", "TS", r"$n^2 \equiv 1 \pmod{8}$",
                 "If n and m are integers with n^2 = 8m + 1, then n^2 is congruent to 1 modulo 8.", ["L6"],
                 "theorem TS (n m : ℤ) (h_L6 : n ^ 2 = 8 * m + 1) : n ^ 2 ≡ 1 [ZMOD 8]",
                 ["rw [h_L6]", "simp [Int.ModEq, Int.add_mul_emod_self_left]"],
                 ratings=["perfect_match", "perfect_match", "minor_inconsistency"]),
        ],
        "full_proof": ["theorem dummy_6 (n : ℤ) (hn : Odd n) : n ^ 2 % 8 = 1 := by",
                       "  obtain ⟨k, rfl⟩ := hn",
                       "  have h := Int.emod_emod_of_dvd_sq k",
                       "  omega"],
        "step_proof": [
            ["theorem dummy_6 (n : ℤ) (hn : Odd n) : n ^ 2 % 8 = 1 := by", "  obtain ⟨k, hk⟩ := hn"],
            ["  have h2 : n ^ 2 = 4 * k ^ 2 + 4 * k + 1 := by rw [hk]; ring"],
            ["  have h3 : n ^ 2 = 4 * k * (k + 1) + 1 := by rw [h2]; ring"],
            ["  have h4 : Even k ∨ Odd k := Int.even_or_odd' k"],
        ],
    },
    {
        "id": "dummy_7",
        "area": "probability_set_theory",
        "theorem": r"If $P(A) = 0.6$ and $P(B) = 0.7$, then $P(A \cap B) \geq 0.3$.",
        "proof": (r"We know that $P(A \cup B) = P(A) + P(B) - P(A \cap B)$. Since $P(A \cup B) \leq 1$, we have "
                  r"$P(A) + P(B) - P(A \cap B) \leq 1$. Substituting the given values: $0.6 + 0.7 - P(A \cap B) "
                  r"\leq 1$, which gives $1.3 - P(A \cap B) \leq 1$. Therefore $P(A \cap B) \geq 0.3$."),
        "steps": [
            r"We know that $P(A \cup B) = P(A) + P(B) - P(A \cap B)$.",
            r"Since $P(A \cup B) \leq 1$, we have $P(A) + P(B) - P(A \cap B) \leq 1$.",
            r"Substituting the given values: $0.6 + 0.7 - P(A \cap B) \leq 1$,",
            r"which gives $1.3 - P(A \cap B) \leq 1$.",
            r"Therefore $P(A \cap B) \geq 0.3$.",
        ],
        "nodes": [
            node("TC1", "TC", "$P(A) = 0.6$", "A is an event of a probability space with P(A) = 0.6.", [],
                 f"{PROB} (A : Set Ω) (h_TC1 : {PA} = 0.6)"),
            node("TC2", "TC", "$P(B) = 0.7$", "B is an event of a probability space with P(B) = 0.7.", [],
                 f"{PROB} (B : Set Ω) (h_TC2 : {PB} = 0.7)"),
            node("L1", "L", r"We know that $P(A \cup B) = P(A) + P(B) - P(A \cap B)$.",
                 "For measurable events A and B of a probability space, P(A ∪ B) = P(A) + P(B) - P(A ∩ B).", [],
                 f"theorem L1 {PROB} (A B : Set Ω) (hA : MeasurableSet A) (hB : MeasurableSet B) : "
                 f"{UNION} = {SUM}",
                 ["have h := MeasureTheory.measure_union_add_inter A hB (μ := μ)",
                  "have h' := congrArg ENNReal.toReal h",
                  "rw [ENNReal.toReal_add (MeasureTheory.measure_ne_top μ _) (MeasureTheory.measure_ne_top μ _),",
                  "  ENNReal.toReal_add (MeasureTheory.measure_ne_top μ _) (MeasureTheory.measure_ne_top μ _)] at h'",
                  "linarith"]),
            node("L2", "L", r"Since $P(A \cup B) \leq 1$",
                 "For events A and B of a probability space, P(A ∪ B) ≤ 1.", [],
                 f"theorem L2 {PROB} (A B : Set Ω) : {UNION} ≤ 1",
                 None,
                 failing_proof=["exact MeasureTheory.prob_le_one"],
                 negation=f"theorem L2_neg {PROB} (A B : Set Ω) : ¬ {UNION} ≤ 1",
                 negation_proof=None,
                 failing_negation_proof=["intro h", "exact absurd h (by norm_num)"]),
            node("L3", "L", r"we have $P(A) + P(B) - P(A \cap B) \leq 1$",
                 "If P(A ∪ B) = P(A) + P(B) - P(A ∩ B) and P(A ∪ B) ≤ 1, then P(A) + P(B) - P(A ∩ B) ≤ 1.",
                 ["L1", "L2"],
                 f"theorem L3 {PROB} (A B : Set Ω) (h_L1 : {UNION} = {SUM}) (h_L2 : {UNION} ≤ 1) : {SUM} ≤ 1",
                 ["linarith"],
                 nodag_lean=f"theorem L3 {PROB} (A B : Set Ω) (h_TC1 : {PA} = 0.6) (h_TC2 : {PB} = 0.7) "
                            f"(h_L1 : {UNION} = {SUM}) (h_L2 : {UNION} ≤ 1) : {SUM} ≤ 1",
                 nodag_failing_proof=["nlinarith [h_TC1, h_TC2, h_L1, h_L2, MeasureTheory.prob_le_one]"],
                 nodag_negation=f"theorem L3_neg {PROB} (A B : Set Ω) (h_TC1 : {PA} = 0.6) (h_TC2 : {PB} = 0.7) "
                                f"(h_L1 : {UNION} = {SUM}) (h_L2 : {UNION} ≤ 1) : ¬ {SUM} ≤ 1",
                 nodag_failing_negation_proof=["intro h", "exact absurd h (by norm_num)"]),
            node("L4", "L", r"Substituting the given values: $0.6 + 0.7 - P(A \cap B) \leq 1$",
                 "If P(A) + P(B) - P(A ∩ B) ≤ 1, P(A) = 0.6 and P(B) = 0.7, then 0.6 + 0.7 - P(A ∩ B) ≤ 1.",
                 ["L3", "TC1", "TC2"],
                 f"theorem L4 {PROB} (A B : Set Ω) (h_TC1 : {PA} = 0.6) (h_TC2 : {PB} = 0.7) "
                 f"(h_L3 : {SUM} ≤ 1) : 0.6 + 0.7 - {INTER} ≤ 1",
                 ["rw [h_TC1, h_TC2] at h_L3", "exact h_L3"],
                 nodag_lean=f"theorem L4 {PROB} (A B : Set Ω) (h_TC1 : {PA} = 0.6) (h_TC2 : {PB} = 0.7) "
                            f"(h_L1 : {UNION} = {SUM}) (h_L2 : {UNION} ≤ 1) (h_L3 : {SUM} ≤ 1) : "
                            f"0.6 + 0.7 - {INTER} < 1",
                 nodag_failing_proof=["nlinarith [h_L1, h_L2, h_L3, MeasureTheory.prob_le_one]"],
                 nodag_negation=f"theorem L4_neg {PROB} (A B : Set Ω) (h_TC1 : {PA} = 0.6) (h_TC2 : {PB} = 0.7) "
                                f"(h_L1 : {UNION} = {SUM}) (h_L2 : {UNION} ≤ 1) (h_L3 : {SUM} ≤ 1) : "
                                f"¬ 0.6 + 0.7 - {INTER} < 1",
                 nodag_negation_proof=["push_neg", "rw [h_TC1, h_TC2] at h_L3", "linarith"]),
            node("L5", "L", r"which gives $1.3 - P(A \cap B) \leq 1$",
                 "If 0.6 + 0.7 - P(A ∩ B) ≤ 1, then 1.3 - P(A ∩ B) ≤ 1.", ["L4"],
                 f"theorem L5 {PROB} (A B : Set Ω) (h_L4 : 0.6 + 0.7 - {INTER} ≤ 1) : 1.3 - {INTER} ≤ 1",
                 ["norm_num at h_L4 ⊢", "linarith"]),
            node("TS", "TS", r"$P(A \cap B) \geq 0.3$", "If 1.3 - P(A ∩ B) ≤ 1, then P(A ∩ B) ≥ 0.3.", ["L5"],
                 f"theorem TS {PROB} (A B : Set Ω) (h_L5 : 1.3 - {INTER} ≤ 1) : {INTER} ≥ 0.3",
                 ["linarith"]),
        ],
        "full_proof": [f"theorem dummy_7 {PROB} (A B : Set Ω) (hB : MeasurableSet B) (h1 : {PA} = 0.6) "
                       f"(h2 : {PB} = 0.7) : {INTER} ≥ 0.3 := by",
                       "  have h := MeasureTheory.measure_inter_add_union_le A B",
                       "  linarith"],
        "step_proof": [
            [f"theorem dummy_7 {PROB} (A B : Set Ω) (hB : MeasurableSet B) (h1 : {PA} = 0.6) "
             f"(h2 : {PB} = 0.7) : {INTER} ≥ 0.3 := by",
             "  have hu := MeasureTheory.measure_union_add_inter A hB (μ := μ)"],
            ["  have hle : μ (A ∪ B) ≤ 1 := MeasureTheory.prob_le_one (A ∪ B)"],
        ],
    },
    {
        "id": "dummy_9",
        "area": "sequences_series",
        "theorem": r"If $(a_n)$ is an arithmetic sequence with $a_1 = 5$ and $a_3 = 11$, then $a_5 = 17$.",
        "proof": (r"Since $(a_n)$ is arithmetic, there exists a common difference $d$ such that $a_n = a_1 + "
                  r"(n-1)d$ for all $n$. From the given information, $a_3 = a_1 + 2d$. Substituting the values: "
                  r"$11 = 5 + 2d$, which gives us $2d = 6$, so $d = 3$. Now we can find $a_5 = a_1 + 4d = 5 + "
                  r"4(3) = 5 + 12 = 17$."),
        "steps": [
            r"Since $(a_n)$ is arithmetic, there exists a common difference $d$ such that $a_n = a_1 + (n-1)d$ "
            r"for all $n$.",
            r"From the given information, $a_3 = a_1 + 2d$.",
            r"Substituting the values: $11 = 5 + 2d$,",
            r"which gives us $2d = 6$,",
            r"so $d = 3$.",
            r"Now we can find $a_5 = a_1 + 4d = 5 + 4(3) = 5 + 12 = 17$.",
        ],
        "graph_first_try_forward_ref": True,
        "nodes": [
            node("TC1", "TC", r"$(a_n)$ is an arithmetic sequence with $a_1 = 5$",
                 "(a_n) is an arithmetic sequence of real numbers with a_1 = 5.", [],
                 f"(a : ℕ → ℝ) (h_TC1 : {ARITH})"),
            node("TC2", "TC", r"$a_3 = 11$", "The sequence (a_n) satisfies a_3 = 11.", [],
                 "(a : ℕ → ℝ) (h_TC2 : a 3 = 11)"),
            node("L1", "L",
                 r"there exists a common difference $d$ such that $a_n = a_1 + (n-1)d$ for all $n$",
                 "If (a_n) is an arithmetic sequence, there is a real d with a_n = a_1 + (n - 1)d for every n ≥ 1.",
                 ["TC1"],
                 f"theorem L1 (a : ℕ → ℝ) (h_TC1 : {ARITH}) : ∃ d : ℝ, {CLOSED}",
                 ["obtain ⟨⟨d, hd⟩, -⟩ := h_TC1",
                  "refine ⟨d, fun n hn => ?_⟩",
                  "induction n with",
                  "| zero => omega",
                  "| succ m ih =>",
                  "  rcases Nat.eq_zero_or_pos m with rfl | hm",
                  "  · simp",
                  "  · rw [hd m, ih hm]",
                  "    push_cast",
                  "    ring"]),
            node("L2", "L", r"From the given information, $a_3 = a_1 + 2d$.",
                 "If a_n = a_1 + (n - 1)d for every n ≥ 1, then a_3 = a_1 + 2d.", ["L1"],
                 f"theorem L2 (a : ℕ → ℝ) (d : ℝ) (h_L1 : {CLOSED}) : a 3 = a 1 + 2 * d",
                 ["rw [h_L1 3 (by norm_num)]", "norm_num"]),
            node("L3", "L", r"Substituting the values: $11 = 5 + 2d$",
                 "If a_3 = a_1 + 2d, a_1 = 5 and a_3 = 11, then 11 = 5 + 2d.", ["L2", "TC1", "TC2"],
                 f"theorem L3 (a : ℕ → ℝ) (d : ℝ) (h_TC1 : {ARITH}) (h_TC2 : a 3 = 11) "
                 "(h_L2 : a 3 = a 1 + 2 * d) : (11 : ℝ) = 5 + 2 * d",
                 ["rw [← h_TC2, h_L2, h_TC1.2]"]),
            node("L4", "L", r"which gives us $2d = 6$", "If 11 = 5 + 2d for a real number d, then 2d = 6.", ["L3"],
                 "theorem L4 (d : ℝ) (h_L3 : (11 : ℝ) = 5 + 2 * d) : 2 * d = 6",
                 ["linarith"],
                 ratings=["perfect_match", "minor_inconsistency"]),
            node("L5", "L", r"so $d = 3$", "If 2d = 6 for a real number d, then d = 3.", ["L4"],
                 "theorem L5 (d : ℝ) (h_L4 : 2 * d = 6) : d = 3",
                 ["linarith"]),
            node("TS", "TS", r"$a_5 = 17$",
                 "If a_n = a_1 + (n - 1)d for every n ≥ 1, d = 3 and a_1 = 5, then a_5 = 17.",
                 ["TC1", "L1", "L5"],
                 f"theorem TS (a : ℕ → ℝ) (d : ℝ) (h_TC1 : {ARITH}) (h_L1 : {CLOSED}) (h_L5 : d = 3) : a 5 = 17",
                 ["rw [h_L1 5 (by norm_num), h_TC1.2, h_L5]", "norm_num"],
                 # With every earlier step available the prover goes straight from the conditions.
                 nodag_lean=f"theorem TS (a : ℕ → ℝ) (d : ℝ) (h_TC1 : {ARITH}) (h_TC2 : a 3 = 11) (h_L5 : d = 3) : "
                            "a 5 = 17",
                 nodag_proof=["obtain ⟨⟨e, he⟩, h1⟩ := h_TC1",
                              "have h3 : a 3 = a 1 + 2 * e := by rw [he 2, he 1]; ring",
                              "have h5 : a 5 = a 1 + 4 * e := by rw [he 4, he 3, h3]; ring",
                              "rw [h5, h1]",
                              "linarith"]),
        ],
        "full_proof": ["theorem dummy_9 (a : ℕ → ℝ) (d : ℝ) (h : ∀ n, a (n + 1) = a n + d) (h1 : a 1 = 5) "
                       "(h3 : a 3 = 11) : a 5 = 17 := by",
                       "  have hd : d = 3 := by linarith [h 1, h 2]",
                       "  linarith [h 3 hd, h 4]"],
        "step_proof": [
            ["theorem dummy_9 (a : ℕ → ℝ) (d : ℝ) (h : ∀ n, a (n + 1) = a n + d) (h1 : a 1 = 5) "
             "(h3 : a 3 = 11) : a 5 = 17 := by",
             "  have hn : ∀ n : ℕ, a (n + 1) = a 1 + n * d := by",
             "    intro n",
             "    induction n with",
             "    | zero => simp",
             "    | succ m ih => rw [h, ih]; push_cast; ring"],
            ["  have h2 : a 3 = a 1 + 2 * d := by rw [hn 2]; norm_num"],
            ["  have h11 : (11 : ℝ) = 5 + 2 * d := h3 ▸ h1 ▸ h2 rfl"],
        ],
    },
]

MOCK_RULES = [
    {"contains": "Int.even_mul_pred", "message": "unknown identifier 'Int.even_mul_pred'"},
    {"contains": "exact MeasureTheory.prob_le_one",
     "message": "type mismatch\n  MeasureTheory.prob_le_one\nhas type\n  μ ?s ≤ 1 : Prop\nbut is expected to have type\n"
                "  (μ (A ∪ B)).toReal ≤ 1 : Prop"},
    {"contains": "exact absurd h (by norm_num)", "message": "unsolved goals"},
    {"contains": "MeasureTheory.prob_le_one]", "message": "linarith failed to find a contradiction"},
    {"contains": "Int.emod_emod_of_dvd_sq", "message": "unknown identifier 'Int.emod_emod_of_dvd_sq'"},
    {"contains": "Int.even_or_odd' k",
     "message": "type mismatch\n  Int.even_or_odd' k\nhas type\n  ∃ j, k = 2 * j ∨ k = 2 * j + 1 : Prop\nbut is "
                "expected to have type\n  Even k ∨ Odd k : Prop"},
    {"contains": "MeasureTheory.measure_inter_add_union_le",
     "message": "unknown identifier 'MeasureTheory.measure_inter_add_union_le'"},
    {"contains": "prob_le_one (A ∪ B)",
     "message": "function expected at\n  MeasureTheory.prob_le_one\nterm has type\n  μ ?s ≤ 1"},
    {"contains": "linarith [h 3 hd, h 4]", "message": "function expected at\n  h 3\nterm has type\n  a (3 + 1) = a 3 + d"},
    {"contains": "h1 ▸ h2 rfl", "message": "function expected at\n  h2\nterm has type\n  a 3 = a 1 + 2 * d"},
]

KIND_LABEL = {"TC": "TC, theorem condition", "D": "D, definition", "L": "L, lemma", "TS": "TS, theorem solution"}


def latency(response):
    return 800 + 3 * len(response)


def rule(contains, response, attempt=0):
    r = {"contains": contains}
    if attempt:
        r["attempt"] = attempt
    r["response"] = response
    r["latency_ms"] = latency(response)
    return r


def lean_block(text):
    return "```lean\n" + text + "\n```"


def with_proof(statement, proof):
    return statement + " := by\n" + "\n".join("  " + line for line in proof)


def truth_graph(p, nodes=None):
    return {"theorem_nl": p["theorem"], "proof_nl": p["proof"],
            "nodes": [{k: n[k] for k in ("id", "kind", "nl_original", "nl_self_contained", "deps")}
                      for n in (nodes or p["nodes"])]}


def judge_response(nl, formal, ratings):
    if len(ratings) == 1:
        parts = [("the whole statement", formal)]
    else:
        head, _, concl = formal.rpartition(" : ")
        parts = [("the variables and hypotheses", head or formal)]
        parts += [("the conclusion", concl or formal)]
        parts += [("the implicit typing of the quantities", formal.split(" ")[0])] * (len(ratings) - 2)
    comps = [{"nl": f"{label} of: {nl}", "lean": lean, "rating": r} for (label, lean), r in zip(parts, ratings)]
    return json.dumps({"components": comps}, ensure_ascii=False)


def judge_rule(nl, formal, ratings):
    return rule(["Natural-language statement:\n" + nl + "\n\nLean statement:", "```lean\n" + formal + "\n```"],
                judge_response(nl, formal, ratings))


def node_rules(p, n, mode, seen):
    out = []

    def add(r):
        key = json.dumps([r["contains"], r.get("attempt", 0)], ensure_ascii=False)
        if key not in seen:
            seen.add(key)
            out.append(r)

    lean = n.get(mode + "_lean") or n["lean"]
    proof = n.get(mode + "_proof") or (None if n.get(mode + "_lean") else n["proof"])
    failing = n.get(mode + "_failing_proof") or (None if n.get(mode + "_lean") else n.get("failing_proof"))
    header = f"Node {n['id']} ({KIND_LABEL[n['kind']]})\nStatement: {n['nl_self_contained']}\n"
    premises_marker = []
    if n.get(mode + "_lean"):
        # distinguishes the all-previous request from the DAG one
        premises_marker = [f"### {pid} [" for pid in premise_ids(p, n, mode)]
    if n.get("first_try"):
        add(rule([header] + premises_marker, lean_block(n["first_try"] + " := by sorry"), attempt=1))
    statement = lean if n["kind"] == "TC" else lean + " := by sorry"
    add(rule([header] + premises_marker, lean_block(statement)))
    ratings = n.get("ratings") or (["perfect_match"] if n["kind"] == "TC" else ["perfect_match", "perfect_match"])
    add(judge_rule(n["nl_self_contained"], statement, ratings))
    if n["kind"] == "TC":
        return out

    tactic_marker = f"Complete the proof of {n['id']}:\n"
    if proof:
        add(rule([tactic_marker, statement], lean_block(with_proof(lean, proof))))
    else:
        add(rule([tactic_marker, statement], lean_block(with_proof(lean, failing))))
        negation = n.get(mode + "_negation") or n.get("negation")
        add(rule(["Negate the conclusion of this theorem:", statement], lean_block(negation + " := by sorry")))
        neg_proof = n.get(mode + "_negation_proof") or n.get("negation_proof")
        neg_failing = n.get(mode + "_failing_negation_proof") or n.get("failing_negation_proof")
        add(rule([tactic_marker, negation + " := by sorry"],
                 lean_block(with_proof(negation, neg_proof or neg_failing))))
    return out


def premise_ids(p, n, mode):
    if mode == "dag":
        return [m["id"] for m in p["nodes"] if m["id"] in n["deps"]]
    ids = []
    for m in p["nodes"]:
        if m["id"] == n["id"]:
            break
        ids.append(m["id"])
    return ids


def problem_rules(p):
    rules = []
    graph_marker = "Build the dependency graph for this theorem and proof.\n\nTheorem:\n" + p["theorem"] + "\n"
    if p.get("graph_first_try_forward_ref"):
        broken = [dict(n) for n in p["nodes"]]
        for b in broken:
            if b["id"] == "L2":
                b["deps"] = ["L3"]
        rules.append(rule([graph_marker], json.dumps(truth_graph(p, broken), ensure_ascii=False), attempt=1))
    rules.append(rule([graph_marker], json.dumps(truth_graph(p), ensure_ascii=False)))

    seen = set()
    for mode in ("nodag", "dag"):
        for n in p["nodes"]:
            rules += node_rules(p, n, mode, seen)

    full_marker = "Theorem:\n" + p["theorem"] + "\n\nProof:\n"
    rules.append(rule(["Formalize the given theorem and prove it", full_marker],
                      lean_block("\n".join(p["full_proof"]))))

    script = []
    for i, lines in enumerate(p["step_proof"]):
        step = p["steps"][i]
        response = "\n".join(lines)
        rules.append(rule(["Theorem:\n" + p["theorem"] + "\n", f"Formalize step {i + 1}: {step}"],
                          lean_block(response)))
        failing = any(r["contains"] in response for r in MOCK_RULES)
        if not failing:
            rules.append(judge_rule(step, response, ["perfect_match", "perfect_match"]))
        script.append(response)
    return rules


def main():
    dataset = ROOT / "data" / "dataset"
    scripts = ROOT / "fixtures" / "scripts"
    dataset.mkdir(parents=True, exist_ok=True)
    scripts.mkdir(parents=True, exist_ok=True)

    def dump(path, value):
        path.write_text(json.dumps(value, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")

    for p in PROBLEMS:
        dump(dataset / f"{p['id']}.json",
             {"id": p["id"], "area": p["area"], "theorem_nl": p["theorem"], "proof_nl": p["proof"],
              "proof_steps": p["steps"], "truth_graphs": [truth_graph(p)]})
        dump(scripts / f"{p['id']}.json", {"rules": problem_rules(p)})

    dump(ROOT / "fixtures" / "mock_verifier.json", {"rules": MOCK_RULES})
    dump(ROOT / "fixtures" / "scripted_providers.json",
         {"default": {"id": "fixture-model", "kind": "script", "script": "scripts"}})
    dump(ROOT / "fixtures" / "providers.json",
         {"default": {"id": "fixture-model", "kind": "fixture", "fixture_dir": "providers"}})


if __name__ == "__main__":
    main()
