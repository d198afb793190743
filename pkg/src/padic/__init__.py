# p-adic module — truncated Laurent series over F_p and exact lemma checks
