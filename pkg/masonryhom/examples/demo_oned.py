# !/usr/bin/env python3
"""
masonryhom 一维链示例程序

本示例演示一维块体链上的均匀化计算，包括：
- ADMM 求解 f_hom 并与闭式解比较
- 回收函数阶梯估计
- ε 序列实验（周期与夹紧边界）
- 宏观泛函求值（含张开裂纹）
"""

from __future__ import annotations

from xtlog import mylog

from masonryhom import AnalyticDensity1D, DensitySweep, EpsilonExperiment, MacroField, ProblemTemplate, SymTensor, analytic_1d, estimate_recession, evaluate, run_sweep

mylog.set_level('INFO')


def demo_density_against_closed_form(sweep: DensitySweep) -> None:
    print('\n=== f_hom 与闭式解 ===')
    for value in (-2.0, -0.5, 0.0, 0.5, 1.0, 1.5, 3.0):
        sol = sweep.solve(SymTensor(1, (value,)))
        expected, _ = analytic_1d(value)
        print(f'ξ={value:+.2f}  f_hom={sol.value:.8f}  闭式={expected:.8f}  迭代={sol.iterations}')
    mylog.info(f'缓存命中 {sweep.cache.hits} 次，未命中 {sweep.cache.misses} 次')


def demo_recession(sweep: DensitySweep) -> None:
    print('\n=== 回收函数 f∞ ===')
    for value in (2.0, 0.5, -1.0):
        xi = SymTensor(1, (value,))
        print(f'ξ={value:+.2f}  数值 f∞={estimate_recession(sweep, xi)}  闭式 f∞={analytic_1d(value)[1]}')


def demo_gamma_sequence(template: ProblemTemplate) -> None:
    print('\n=== ε 序列实验 ===')
    xi = SymTensor(1, (2.0,))
    for boundary in ('periodic', 'clamp'):
        result = run_sweep(EpsilonExperiment(template, xi, (1, 2, 4, 8), boundary=boundary))
        energies = ', '.join(f'N={row.n}: {row.energy:.6f}' for row in result.rows)
        print(f'{boundary:<8s} f_hom={result.f_hom:.6f}  {energies}')


def demo_macro_energy() -> None:
    print('\n=== 宏观泛函 ===')
    density = AnalyticDensity1D()
    smooth = MacroField.piecewise_1d([0.0, 1.0], [0.0], [0.5])
    opening = MacroField.piecewise_1d([0.0, 0.5, 1.0], [0.0, 0.2], [0.0, 0.0])
    closing = MacroField.piecewise_1d([0.0, 0.5, 1.0], [0.0, -0.2], [0.0, 0.0])
    for name, macro in (('光滑', smooth), ('张开', opening), ('闭合', closing)):
        energy = evaluate(macro, density)
        print(f'{name}: 体能量={energy.bulk:.4f}  奇异部分={energy.singular:.4f}  总能量={energy.total}  可容许={energy.admissible}')


if __name__ == '__main__':
    print('=' * 60)
    print('masonryhom 一维链示例')
    print('=' * 60)
    chain = ProblemTemplate.from_strings('chain')
    chain_sweep = DensitySweep(chain)
    demo_density_against_closed_form(chain_sweep)
    demo_recession(chain_sweep)
    demo_gamma_sequence(chain)
    demo_macro_energy()
    print('\n所有示例执行完毕')
