//! Hand-written snippet pairs shared by the oracle and renaming suites.

pub struct SnippetPair {
    pub language: &'static str,
    pub a: &'static str,
    pub b: &'static str,
}

const fn pair(language: &'static str, a: &'static str, b: &'static str) -> SnippetPair {
    SnippetPair { language, a, b }
}

/// Twenty pairs ranging from identical to structurally unrelated.
pub const ORACLE_PAIRS: [SnippetPair; 20] = [
    pair("python", "x = 1\n", "x = 1\n"),
    pair("python", "x = 1\n", "y = 2\n"),
    pair("python", "pass\n", "x = 1\n"),
    pair("python", "pass\n", "pass\n"),
    pair(
        "python",
        "def f(n):\n    return n + 1\n",
        "def g(n):\n    total = n\n    total += 1\n    return total\n",
    ),
    pair("python", "for i in range(3):\n    print(i)\n", "i = 0\nwhile i < 3:\n    print(i)\n    i += 1\n"),
    pair(
        "python",
        "squares = [i * i for i in range(10)]\n",
        "squares = []\nfor i in range(10):\n    squares.append(i * i)\n",
    ),
    pair(
        "python",
        "def fib(n):\n    if n < 2:\n        return n\n    return fib(n - 1) + fib(n - 2)\n",
        "def fib(n):\n    a, b = 0, 1\n    for _ in range(n):\n        a, b = b, a + b\n    return a\n",
    ),
    pair("python", "import os\nprint(os.getcwd())\n", "from os import getcwd\nprint(getcwd())\n"),
    pair("python", "class A:\n    def run(self):\n        return 1\n", "class B:\n    value = 'run'\n"),
    pair("sql", "SELECT 1;\n", "SELECT 1;\n"),
    pair("sql", "SELECT 1;\n", "SELECT 2;\n"),
    pair("sql", "SELECT name FROM singer;\n", "SELECT title FROM song;\n"),
    pair("sql", "SELECT COUNT(*) FROM singer;\n", "SELECT COUNT(*) FROM singer WHERE age > 30;\n"),
    pair(
        "sql",
        "SELECT country, COUNT(*) FROM singer GROUP BY country;\n",
        "SELECT country FROM singer GROUP BY country HAVING COUNT(*) > 1;\n",
    ),
    pair(
        "sql",
        "SELECT name FROM stadium ORDER BY capacity DESC LIMIT 1;\n",
        "SELECT name FROM stadium WHERE capacity = (SELECT MAX(capacity) FROM stadium);\n",
    ),
    pair(
        "sql",
        "SELECT T1.name FROM singer AS T1 JOIN song AS T2 ON T1.id = T2.singer_id;\n",
        "SELECT name FROM singer WHERE id IN (SELECT singer_id FROM song);\n",
    ),
    pair(
        "sql",
        "INSERT INTO people (name, age) VALUES ('ann', 31);\n",
        "UPDATE people SET age = 31 WHERE name = 'ann';\n",
    ),
    pair("sql", "SELECT DISTINCT country FROM singer;\n", "SELECT country FROM singer GROUP BY country;\n"),
    pair(
        "sql",
        "-- adults\nSELECT name FROM people WHERE age >= 18;\n",
        "SELECT name FROM people WHERE NOT age < 18;\n",
    ),
];

/// Ten pairs whose sources differ only in identifier names. Every pair
/// renames to fresh names, never a permutation of existing ones.
pub const RENAMED_PAIRS: [SnippetPair; 10] = [
    pair("python", "total = count + 1\n", "acc = n + 1\n"),
    pair(
        "python",
        "def area(width, height):\n    return width * height\n",
        "def size(w, h):\n    return w * h\n",
    ),
    pair("python", "for item in items:\n    print(item)\n", "for element in elements:\n    print(element)\n"),
    pair(
        "python",
        "class Stack:\n    def push(self, value):\n        self.data.append(value)\n",
        "class Pile:\n    def put(self, obj):\n        self.store.append(obj)\n",
    ),
    pair("python", "result = [x * 2 for x in values if x > 0]\n", "out = [v * 2 for v in nums if v > 0]\n"),
    pair(
        "python",
        "def fib(n):\n    if n < 2:\n        return n\n    return fib(n - 1) + fib(n - 2)\n",
        "def f(k):\n    if k < 2:\n        return k\n    return f(k - 1) + f(k - 2)\n",
    ),
    pair("sql", "SELECT name FROM singer;\n", "SELECT title FROM song;\n"),
    pair(
        "sql",
        "SELECT country, COUNT(*) FROM singer GROUP BY country;\n",
        "SELECT city, COUNT(*) FROM venue GROUP BY city;\n",
    ),
    pair(
        "sql",
        "SELECT T1.name FROM singer AS T1 JOIN song AS T2 ON T1.id = T2.singer_id;\n",
        "SELECT A.title FROM album AS A JOIN track AS B ON A.key = B.album_key;\n",
    ),
    pair(
        "sql",
        "UPDATE people SET age = 3 WHERE name = 'x';\n",
        "UPDATE staff SET rank = 3 WHERE handle = 'x';\n",
    ),
];
