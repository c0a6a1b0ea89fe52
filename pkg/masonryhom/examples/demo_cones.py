# !/usr/bin/env python3
"""
masonryhom 二维砌体示例程序

本示例演示顺缝/错缝单元上的锥运算与张拉锥检测：
- 锥投影与 Moreau 分解
- 单块顺缝单元的 f_hom 与干砌体 g_hom
- 方向扫描得到 H_hom 与 K_hom
- 增长审计与凸性/齐次性抽查
"""

from __future__ import annotations

from xtlog import mylog

from masonryhom import ConeSpec, DensitySweep, ProblemTemplate, SymTensor, audit_growth, audit_shape, detect_cones, polar_project, project_cone, sample_directions
from masonryhom.density import sample_density, sample_strains

mylog.set_level('INFO')


def demo_projection() -> None:
    print('\n=== 锥投影 ===')
    cone = ConeSpec.from_tensors([SymTensor.from_entries(1.0, 0.0), SymTensor.from_entries(0.0, 1.0)], 'diag')
    eta = SymTensor.from_entries(2.0, -1.0, 0.5)
    proj, polar = project_cone(cone, eta), polar_project(cone, eta)
    print(f'η={eta.components}')
    print(f'P_K η={proj.components}  P_K° η={polar.components}')
    print(f'和={tuple(round(a + b, 12) for a, b in zip(proj.components, polar.components, strict=True))}')


def demo_stack_densities(sweep: DensitySweep) -> None:
    print('\n=== 顺缝单元 f_hom / g_hom ===')
    for entries in ((2.0, 0.0), (2.0, 2.0), (2.0, -3.0), (-1.0, -1.0)):
        xi = SymTensor.from_entries(*entries)
        print(f'ξ=diag{entries}  f_hom={sweep.f(xi):.6f}  g_hom={sweep.g(xi):.6f}')


def demo_cone_detection(sweep: DensitySweep) -> None:
    print('\n=== 张拉锥检测 ===')
    detection = detect_cones(sweep, sample_directions(2, count=16))
    print(f'H_hom 生成元 {len(detection.h_hom)} 个，K_hom 生成元 {len(detection.k_hom)} 个')
    print(f'对称差: {detection.symmetric_difference or "无"}')


def demo_audit(sweep: DensitySweep) -> None:
    print('\n=== 增长审计 ===')
    samples = sample_density(sweep, sample_strains(2, 8, radius=2.0, seed=1))
    audit = audit_growth(samples, sweep.template.A)
    print(f'通过={audit.passed}  违例={len(audit.offending)}')
    shape = audit_shape(sweep, samples, pairs=16)
    print(f'凸性最大超出={shape.worst_convexity_excess:.2e}  齐次性最大相对误差={shape.worst_homogeneity_error:.2e}')


if __name__ == '__main__':
    print('=' * 60)
    print('masonryhom 二维砌体示例')
    print('=' * 60)
    demo_projection()
    stack = DensitySweep(ProblemTemplate.from_strings('stack:1x1'))
    demo_stack_densities(stack)
    demo_cone_detection(stack)
    demo_audit(stack)
    print('\n所有示例执行完毕')
