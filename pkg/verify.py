from flatdeform.core.report import DeformationRun
from flatdeform.utils.problem import a8_relations, build_a8, build_m2_toy, grading_of, presentation_of

for name, problem in (("toy-m2", build_m2_toy()), ("a8", build_a8())):
    print(f"Running {name}...")
    run = DeformationRun(problem)
    run.analyze()
    print(f"  rank {run.basis.n}, orders {run.basis.orders}")
    print(f"  fiber: {run.fiber().summary()}")
    if name == "a8":
        rels = a8_relations()
        verdict = run.present(presentation_of(rels), grading_of(rels.weights), rels.bound)
        print(f"  presentation: {verdict.verdict}")
    print(f"  {run.flatcert(20).summary()}")
    print(run.report.model_dump_json(indent=2))
