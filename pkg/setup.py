""" Setup file """
import os
import re

from setuptools import find_packages, setup

HERE = os.path.abspath(os.path.dirname(__file__))
README = open(os.path.join(HERE, 'README.rst')).read()
# Remove syntax highlighting for pypi
README = re.sub(r'.. sourcecode.*', '::', README)
CHANGES = open(os.path.join(HERE, 'CHANGES.rst')).read()

REQUIREMENTS = [
    'numpy',
    'scipy>=1.7',
    'six',
]

TEST_REQUIREMENTS = [
    'pytest',
    'mock',
]

if __name__ == "__main__":
    setup(
        name='metricfuse',
        version='0.1.0',
        description="Calibrated weighted composites of machine translation "
        "metrics",
        long_description=README + '\n\n' + CHANGES,
        classifiers=[
            'Development Status :: 3 - Alpha',
            'Intended Audience :: Science/Research',
            'License :: OSI Approved :: MIT License',
            'Operating System :: OS Independent',
            'Programming Language :: Python',
            'Programming Language :: Python :: 3',
            'Topic :: Scientific/Engineering :: Artificial Intelligence',
            'Topic :: Text Processing :: Linguistic',
        ],
        license='MIT',
        keywords='machine translation evaluation metrics bayesian '
        'optimization',
        platforms='any',
        python_requires='>=3.6',
        include_package_data=True,
        packages=find_packages(exclude=('tests',)),
        install_requires=REQUIREMENTS,
        tests_require=REQUIREMENTS + TEST_REQUIREMENTS,
        extras_require={'test': TEST_REQUIREMENTS},
        entry_points={
            'console_scripts': [
                'metricfuse = metricfuse.cli:main',
            ],
        },
    )
