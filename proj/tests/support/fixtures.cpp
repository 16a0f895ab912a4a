#include "fixtures.hpp"

namespace fixtures {

const char *const point_dump = R"(class Point {
    int x,y;
    virtual void dump(){
        printf("Point\n");
    }
};

class ColorPoint: public Point {
    int color;
    void dump(){
        printf("ColorPoint\n");
    }
}

void print(Point p) {
    p.dump();
}

int main() {
    Point a;
    ColorPoint b;

    print(a);
    print(b);
};
)";

const char *const bad_override = R"(class Point {
    int x,y;
    virtual bool equal(Point p){
        return (x==p.x)&&(y==p.y);
    }
};

class ColorPoint: public Point {
    int color;
    virtual bool equal(ColorPoint p){
        return (x==p.x)&&(y==p.y)&&
            (color==p.color);
    }
};

bool func(Point p1, Point p2){
    return p1.equal(p2);
}

int main(){
    ColorPoint a;
    Point b;

    return func(a,b);
}
)";

const char *const equal_mm = R"(class Point {
    int x,y;
    bool @equal(Point p){
        return (x==p.x)&&(y==p.y);
    }
};

class ColorPoint: public Point {
    int color;
    bool @equal(ColorPoint p){
        return (x==p.x)&&(y==p.y)&&
            (color==p.color);
    }
};

bool func(Point p1, Point p2){
    return p1.@equal(p2);
}

int main(){
    ColorPoint a;
    Point b;

    return func(a,b);
}
)";

const char *const equal_mixed = R"(class Point {
    int x,y;
    bool @equal(Point &p){
        return (x==p.x)&&(y==p.y);
    }
};

class ColorPoint: public Point {
    int color;
};

bool @equal(ColorPoint &p1,
            ColorPoint &p2) {
    return (p1.x==p2.x)&&(p1.y==p2.y)&&
        (p1.color==p2.color);
}

int main() {
    Point p;
    ColorPoint cp;

    @equal(p, cp);
    return cp.@equal(p);
}
)";

const char *const diamond_returns = R"(class A { int a; };
class B: public A { int b; };
class C: public A { int c; };
class D: public B, public C { int d; };

A @m(A x, A y) { A r; return r; }
B @m(B x, B y) { B r; return r; }
C @m(C x, C y) { C r; return r; }
D @m(D x, D y) { D r; return r; }

int main() {
    A a1;
    A a2;
    @m(a1, a2);
    return 0;
}
)";

const char *const const_dispatch = R"(class A { int a; };
class B: public A { int b; };

int @m(A x, B y) { return 1; }
int @m(const A x, B y) { return 2; }

int g(const A x, B y) {
    return @m(x, y);
}

int main() {
    A a;
    B b;
    printf("%d %d\n", @m(a, b), g(a, b));
    return 0;
}
)";

const char *const byvalue_dynamic = R"(class A { int a; };
class B: public A { int b; };

int @m(A x) {
    printf("A\n");
    return 1;
}
int @m(B x) {
    printf("B\n");
    return 2;
}

int f(A x) {
    return @m(x);
}

int main() {
    B b;

    return f(b);
}
)";

const char *const return_realign = R"(class A { int a; };
class B { int b; };
class C: public A, public B { int c; };

B @m(B x, B y) {
    B r;
    r.b = 1;
    return r;
}
C @m(C x, C y) {
    C r;
    r.a = 7;
    r.b = 8;
    r.c = 9;
    return r;
}

int f1(B x) { return x.b; }

int f2(B b1, B b2) {
    return f1(@m(b1, b2));
}

int main() {
    C c1;
    C c2;
    return f2(c1, c2);
}
)";

const char *const five_class_table = R"(class A { int a; };
class B { int b; };
class C { int c; };
class D: public A,
      public B { int d; };
class E: public C,
      public D { int e; };

int @m(B x, B y) {
    return y.b;
}
int @m(D x, D y) {
    return y.d;
}

int main() {
    B b;
    E e;
    e.c = 10;
    e.a = 11;
    e.b = 12;
    e.d = 13;
    e.e = 14;
    b.b = 7;
    return @m(b, e);
}
)";

// ---- multi-file sets -------------------------------------------------------

static const char *const joint_classes_header = R"(class A { int a; };
class B { int b; };
class C: public A, public B { int c; };

A @m(A x, A y);
B @m(B x, B y);
int f1(A x);
)";

FileSet ambiguous_return_set() {
    return {
        {"classes.oolh", joint_classes_header},
        {"wide.ool", R"(#include "classes.oolh"

int f2(C o1, C o2){
    return f1(@m(o1,o2));
}
)"},
        {"narrow.ool", R"(#include "classes.oolh"

A @m(A x, A y) { A r; return r; }
B @m(B x, B y) { B r; return r; }
int f1(A x) { return x.a; }

int f2(A o1, A o2){
    return f1(@m(o1,o2));
}
)"},
    };
}

FileSet link_resolution_set() {
    FileSet set = ambiguous_return_set();
    set.erase(set.begin() + 1); // drop the uncompilable wide variant
    set.push_back({"joint.ool", R"(#include "classes.oolh"

C @m(C x, C y) { C r; return r; }
)"});
    set.push_back({"main.ool", R"(#include "classes.oolh"

C @m(C x, C y);

int main() {
    C c1;
    C c2;
    @m(c1, c2);
    return 0;
}
)"});
    set.push_back({"plainmain.ool", R"(#include "classes.oolh"

int main() {
    return 0;
}
)"});
    return set;
}

FileSet pairwise_link_set() {
    return {
        {"classes.oolh", R"(class A { int a; };
class B: public A { int b; };
)"},
        {"first.ool", R"(#include "classes.oolh"

int @m(A a, B b) { return 1; }

int f() {
    B b1,b2;
    return @m(b1,b2);
}
)"},
        {"second.ool", R"(#include "classes.oolh"

int @m(B b, A a) { return 2; }

int main() {
    B b1,b2;
    return @m(b1,b2);
}
)"},
    };
}

FileSet multiple_inh_link_set() {
    return {
        {"classes.oolh", R"(class A { int a; };
class B { int b; };

int @m(A a1, A a2);
int @m(B b1, B b2);
)"},
        {"first.ool", R"(#include "classes.oolh"

int @m(A a1, A a2) { return 1; }
int @m(B b1, B b2) { return 2; }
)"},
        {"second.ool", R"(#include "classes.oolh"

class C: public A, public B { int c; };

int main() {
    C c1,c2;
    return @m(c1,c2);
}
)"},
    };
}

FileSet transitivity_link_set() {
    return {
        {"classes.oolh", R"(class A { int a; };
class B: public A { int b; };
class C: public A { int c; };

int @m(A a1, A a2);
)"},
        {"first.ool", R"(#include "classes.oolh"

int @m(A a1, A a2) { return 1; }
)"},
        {"second.ool", R"(#include "classes.oolh"

class D: public B, public C { int d; };

int main() {
    D d1,d2;
    return @m(d1,d2);
}
)"},
    };
}

FileSet strip_bodies_set() {
    return {
        {"shapes.oolh", R"(class Shape { int tag; };
class Square: public Shape { int side; };

int @area(Shape s);
int @area(Square s);
int describe(Shape s);
)"},
        // Full library: declarations plus definitions in one file.
        {"lib.ool", R"(#include "shapes.oolh"

int @area(Shape s) { return 1; }
int @area(Square s) { return s.side * s.side; }
int describe(Shape s) { return @area(s); }
)"},
        // The same library split: interface-only module ...
        {"lib_decl.ool", R"(#include "shapes.oolh"

int @area(Shape s);
int @area(Square s);
int describe(Shape s);
)"},
        // ... plus a definitions-only module.
        {"lib_impl.ool", R"(#include "shapes.oolh"

int @area(Shape s) { return 1; }
int @area(Square s) { return s.side * s.side; }
int describe(Shape s) { return @area(s); }
)"},
        {"client.ool", R"(#include "shapes.oolh"

int main() {
    Square q;
    q.side = 6;
    return describe(q);
}
)"},
    };
}

} // namespace fixtures
