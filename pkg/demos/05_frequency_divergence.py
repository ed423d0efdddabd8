"""A beta-shift sequence along which the frequency of a digit keeps oscillating.

Run: python demos/05_frequency_divergence.py
"""
from betashift import Beta
from betashift.frequency import construct_divergent_point, divergence_report, word_frequency_trace

for beta, r in ((Beta(2), 2), (Beta.golden_ratio(), 3)):
    rep = divergence_report(beta, (1,), r, 10 ** 6)
    print(f"beta={beta.to_json()['name']}: block {rep['block']}, ratio {rep['ratio']}")
    print(f"   observed liminf/limsup {float(rep['liminf_est']):.4f} / {float(rep['limsup_est']):.4f}"
          f"   closed form {rep['closed_form'][0]} / {rep['closed_form'][1]}")

s = construct_divergent_point(Beta.golden_ratio(), (1,), 3)
ends = s.block_ends(10 ** 5)
tr = word_frequency_trace(s, (1,), ends)
print("\nfrequency of 1 at the block ends (golden base):")
for n, f in list(zip(tr.prefix_lengths, tr.ratios))[-6:]:
    print(f"   n={n:>7}  {f:.4f}")
