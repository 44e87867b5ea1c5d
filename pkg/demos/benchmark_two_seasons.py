"""Validate the solver against the published two-season steady state.

The cycle length is a parameter, so the same solver code runs the classic
two-season (winter/summer) version of the model. The bundled parameter
file pins that benchmark; the solved stocks and sale probabilities must
land on the published values.
"""

from thickmarket.fixtures import load_biannual_benchmark
from thickmarket.workflows import replicate_biannual


def main():
    params = load_biannual_benchmark()
    print("two-season benchmark parameters:")
    for key in ("beta_hat", "delta", "theta", "u"):
        print(f"  {key} = {params[key]}")
    print(f"  survival = {params['survival']}  ({params['labels']})")

    report = replicate_biannual(params)
    print(f"\nsolved in {report['iterations']} iterations "
          f"(residual {report['residual']:.2e})")
    for i, label in enumerate(report["labels"]):
        print(f"  {label}: stock v = {report['vacancies'][i]:.4f}, "
              f"sale probability = {report['sale_probability'][i]:.4f}")

    targets = report["targets"]
    print(f"\npublished targets: q = {targets['sale_probability']}, "
          f"v = {targets['vacancies']} (tolerance {targets['tolerance']})")
    print(f"max errors: q {targets['max_error_sale_probability']:.2e}, "
          f"v {targets['max_error_vacancies']:.2e}")
    print("validation:", "PASS" if targets["within_tolerance"] else "FAIL")


if __name__ == "__main__":
    main()
