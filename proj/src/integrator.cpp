#include "bjj/integrator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace bjj {

namespace {

using Vec4 = std::array<double, 4>;

// Hairer-Norsett-Wanner eighth-order Dormand-Prince pair with embedded
// fifth- and third-order error estimators and seventh-order continuous
// extension (the dop853 tableau).
namespace dp853 {

constexpr double c2 = 0.526001519587677318785587544488e-01;
constexpr double c3 = 0.789002279381515978178381316732e-01;
constexpr double c4 = 0.118350341907227396726757197510e+00;
constexpr double c5 = 0.281649658092772603273242802490e+00;
constexpr double c6 = 0.333333333333333333333333333333e+00;
constexpr double c7 = 0.25e+00;
constexpr double c8 = 0.307692307692307692307692307692e+00;
constexpr double c9 = 0.651282051282051282051282051282e+00;
constexpr double c10 = 0.6e+00;
constexpr double c11 = 0.857142857142857142857142857142e+00;
constexpr double c14 = 0.1e+00;
constexpr double c15 = 0.2e+00;
constexpr double c16 = 0.777777777777777777777777777778e+00;

constexpr double a21 = 5.26001519587677318785587544488e-2;
constexpr double a31 = 1.97250569845378994544595329183e-2;
constexpr double a32 = 5.91751709536136983633785987549e-2;
constexpr double a41 = 2.95875854768068491816892993775e-2;
constexpr double a43 = 8.87627564304205475450678981324e-2;
constexpr double a51 = 2.41365134159266685502369798665e-1;
constexpr double a53 = -8.84549479328286085344864962717e-1;
constexpr double a54 = 9.24834003261792003115737966543e-1;
constexpr double a61 = 3.7037037037037037037037037037e-2;
constexpr double a64 = 1.70828608729473871279604482173e-1;
constexpr double a65 = 1.25467687566822425016691814123e-1;
constexpr double a71 = 3.7109375e-2;
constexpr double a74 = 1.70252211019544039314978060272e-1;
constexpr double a75 = 6.02165389804559606850219397283e-2;
constexpr double a76 = -1.7578125e-2;
constexpr double a81 = 3.70920001185047927108779319836e-2;
constexpr double a84 = 1.70383925712239993810214054705e-1;
constexpr double a85 = 1.07262030446373284651809199168e-1;
constexpr double a86 = -1.53194377486244017527936158236e-2;
constexpr double a87 = 8.27378916381402288758473766002e-3;
constexpr double a91 = 6.24110958716075717114429577812e-1;
constexpr double a94 = -3.36089262944694129406857109825e0;
constexpr double a95 = -8.68219346841726006818189891453e-1;
constexpr double a96 = 2.75920996994467083049415600797e1;
constexpr double a97 = 2.01540675504778934086186788979e1;
constexpr double a98 = -4.34898841810699588477366255144e1;
constexpr double a101 = 4.77662536438264365890433908527e-1;
constexpr double a104 = -2.48811461997166764192642586468e0;
constexpr double a105 = -5.90290826836842996371446475743e-1;
constexpr double a106 = 2.12300514481811942347288949897e1;
constexpr double a107 = 1.52792336328824235832596922938e1;
constexpr double a108 = -3.32882109689848629194453265587e1;
constexpr double a109 = -2.03312017085086261358222928593e-2;
constexpr double a111 = -9.3714243008598732571704021658e-1;
constexpr double a114 = 5.18637242884406370830023853209e0;
constexpr double a115 = 1.09143734899672957818500254654e0;
constexpr double a116 = -8.14978701074692612513997267357e0;
constexpr double a117 = -1.85200656599969598641566180701e1;
constexpr double a118 = 2.27394870993505042818970056734e1;
constexpr double a119 = 2.49360555267965238987089396762e0;
constexpr double a1110 = -3.0467644718982195003823669022e0;
constexpr double a121 = 2.27331014751653820792359768449e0;
constexpr double a124 = -1.05344954667372501984066689879e1;
constexpr double a125 = -2.00087205822486249909675718444e0;
constexpr double a126 = -1.79589318631187989172765950534e1;
constexpr double a127 = 2.79488845294199600508499808837e1;
constexpr double a128 = -2.85899827713502369474065508674e0;
constexpr double a129 = -8.87285693353062954433549289258e0;
constexpr double a1210 = 1.23605671757943030647266201528e1;
constexpr double a1211 = 6.43392746015763530355970484046e-1;

constexpr double a141 = 5.61675022830479523392909219681e-2;
constexpr double a147 = 2.53500210216624811088794765333e-1;
constexpr double a148 = -2.46239037470802489917441475441e-1;
constexpr double a149 = -1.24191423263816360469010140626e-1;
constexpr double a1410 = 1.5329179827876569731206322685e-1;
constexpr double a1411 = 8.20105229563468988491666602057e-3;
constexpr double a1412 = 7.56789766054569976138603589584e-3;
constexpr double a1413 = -8.298e-3;
constexpr double a151 = 3.18346481635021405060768473261e-2;
constexpr double a156 = 2.83009096723667755288322961402e-2;
constexpr double a157 = 5.35419883074385676223797384372e-2;
constexpr double a158 = -5.49237485713909884646569340306e-2;
constexpr double a1511 = -1.08347328697249322858509316994e-4;
constexpr double a1512 = 3.82571090835658412954920192323e-4;
constexpr double a1513 = -3.40465008687404560802977114492e-4;
constexpr double a1514 = 1.41312443674632500278074618366e-1;
constexpr double a161 = -4.28896301583791923408573538692e-1;
constexpr double a166 = -4.69762141536116384314449447206e0;
constexpr double a167 = 7.68342119606259904184240953878e0;
constexpr double a168 = 4.06898981839711007970213554331e0;
constexpr double a169 = 3.56727187455281109270669543021e-1;
constexpr double a1613 = -1.39902416515901462129418009734e-3;
constexpr double a1614 = 2.9475147891527723389556272149e0;
constexpr double a1615 = -9.15095847217987001081870187138e0;

constexpr double b1 = 5.42937341165687622380535766363e-2;
constexpr double b6 = 4.45031289275240888144113950566e0;
constexpr double b7 = 1.89151789931450038304281599044e0;
constexpr double b8 = -5.8012039600105847814672114227e0;
constexpr double b9 = 3.1116436695781989440891606237e-1;
constexpr double b10 = -1.52160949662516078556178806805e-1;
constexpr double b11 = 2.01365400804030348374776537501e-1;
constexpr double b12 = 4.47106157277725905176885569043e-2;

constexpr double e31 = 0.244094488188976377952755905512e+00;
constexpr double e32 = 0.733846688281611857341361741547e+00;
constexpr double e33 = 0.220588235294117647058823529412e-01;

constexpr double e51 = 0.1312004499419488073250102996e-01;
constexpr double e56 = -0.1225156446376204440720569753e+01;
constexpr double e57 = -0.4957589496572501915214079952e+00;
constexpr double e58 = 0.1664377182454986536961530415e+01;
constexpr double e59 = -0.3503288487499736816886487290e+00;
constexpr double e510 = 0.3341791187130174790297318841e+00;
constexpr double e511 = 0.8192320648511571246570742613e-01;
constexpr double e512 = -0.2235530786388629525884427845e-01;

constexpr double d41 = -0.84289382761090128651353491142e+01;
constexpr double d46 = 0.56671495351937776962531783590e+00;
constexpr double d47 = -0.30689499459498916912797304727e+01;
constexpr double d48 = 0.23846676565120698287728149680e+01;
constexpr double d49 = 0.21170345824450282767155149946e+01;
constexpr double d410 = -0.87139158377797299206789907490e+00;
constexpr double d411 = 0.22404374302607882758541771650e+01;
constexpr double d412 = 0.63157877876946881815570249290e+00;
constexpr double d413 = -0.88990336451333310820698117400e-01;
constexpr double d414 = 0.18148505520854727256656404962e+02;
constexpr double d415 = -0.91946323924783554000451984436e+01;
constexpr double d416 = -0.44360363875948939664310572000e+01;
constexpr double d51 = 0.10427508642579134603413151009e+02;
constexpr double d56 = 0.24228349177525818288430175319e+03;
constexpr double d57 = 0.16520045171727028198505394887e+03;
constexpr double d58 = -0.37454675472269020279518312152e+03;
constexpr double d59 = -0.22113666853125306036270938578e+02;
constexpr double d510 = 0.77334326684722638389603898808e+01;
constexpr double d511 = -0.30674084731089398182061213626e+02;
constexpr double d512 = -0.93321305264302278729567221706e+01;
constexpr double d513 = 0.15697238121770843886131091075e+02;
constexpr double d514 = -0.31139403219565177677282850411e+02;
constexpr double d515 = -0.93529243588444783865713862664e+01;
constexpr double d516 = 0.35816841486394083752465898540e+02;
constexpr double d61 = 0.19985053242002433820987653617e+02;
constexpr double d66 = -0.38703730874935176555105901742e+03;
constexpr double d67 = -0.18917813819516756882830838328e+03;
constexpr double d68 = 0.52780815920542364900561016686e+03;
constexpr double d69 = -0.11573902539959630126141871134e+02;
constexpr double d610 = 0.68812326946963000169666922661e+01;
constexpr double d611 = -0.10006050966910838403183860980e+01;
constexpr double d612 = 0.77771377980534432092869265740e+00;
constexpr double d613 = -0.27782057523535084065932004339e+01;
constexpr double d614 = -0.60196695231264120758267380846e+02;
constexpr double d615 = 0.84320405506677161018159903784e+02;
constexpr double d616 = 0.11992291136182789328035130030e+02;
constexpr double d71 = -0.25693933462703749003312586129e+02;
constexpr double d76 = -0.15418974869023643374053993627e+03;
constexpr double d77 = -0.23152937917604549567536039109e+03;
constexpr double d78 = 0.35763911791061412378285349910e+03;
constexpr double d79 = 0.93405324183624310003907691704e+02;
constexpr double d710 = -0.37458323136451633156875139351e+02;
constexpr double d711 = 0.10409964950896230045147246184e+03;
constexpr double d712 = 0.29840293426660503123344363579e+02;
constexpr double d713 = -0.43533456590011143754432175058e+02;
constexpr double d714 = 0.96324553959188282948394950600e+02;
constexpr double d715 = -0.39177261675615439165231486172e+02;
constexpr double d716 = -0.14972683625798562581422125276e+03;

}  // namespace dp853

constexpr double kEps = std::numeric_limits<double>::epsilon();

Vec4 to_vec(const State& s) { return {s.Z_a, s.Z_b, s.phi_a, s.phi_b}; }
State to_state(const Vec4& v) { return {v[0], v[1], v[2], v[3]}; }

bool finite(const Vec4& v) {
    return std::isfinite(v[0]) && std::isfinite(v[1]) && std::isfinite(v[2]) &&
           std::isfinite(v[3]);
}

// Non-throwing right-hand side: outside the |Z| < 1 domain the derivative
// is reported as NaN, which the step controller treats as a rejection.
Vec4 rhs_raw(const ModelParams& p, const Vec4& y) {
    if (!(std::abs(y[0]) < 1.0) || !(std::abs(y[1]) < 1.0) || !finite(y)) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        return {nan, nan, nan, nan};
    }
    const StateDerivative d = eval_rhs(p, to_state(y));
    return {d.dZ_a, d.dZ_b, d.dphi_a, d.dphi_b};
}

// Throws PoleApproach if a state to be handed to the caller is outside the
// pole margin (or not finite at all).
void check_pole(const Vec4& y, double t, double margin) {
    for (int i = 0; i < 2; ++i) {
        const char species = i == 0 ? 'a' : 'b';
        if (!std::isfinite(y[i]) || std::abs(y[i]) > 1.0 - margin)
            throw PoleApproach(t, species, y[i]);
    }
    if (!std::isfinite(y[2]) || !std::isfinite(y[3]))
        throw PoleApproach(t, 'a', y[0]);
}

class Dop853 {
  public:
    Dop853(const ModelParams& p, const IntegratorConfig& cfg)
        : p_(p), cfg_(cfg) {}

    Trajectory run(const State& s0) {
        Trajectory traj;
        traj.params = p_;

        Vec4 y = to_vec(s0);
        double t = 0.0;
        check_pole(y, t, cfg_.pole_margin);
        emit(traj, t, y);
        next_sample_ = 1;

        Vec4 f0 = rhs_raw(p_, y);
        if (!finite(f0)) throw PoleApproach(t, 'a', y[0]);
        double h = initial_step(y, f0);

        bool last_rejected = false;
        long nstep = 0;
        while (t < cfg_.t_end) {
            if (++nstep > kMaxSteps)
                throw StepFailure("step count exceeded " +
                                  std::to_string(kMaxSteps));
            if (h < 4.0 * kEps * std::max(std::abs(t), 1.0))
                throw StepFailure("step size underflow at t = " +
                                  std::to_string(t));
            h = std::min(h, cfg_.max_step);
            const bool clipped = t + h >= cfg_.t_end;
            const double hs = clipped ? cfg_.t_end - t : h;

            const double err = attempt(y, f0, t, hs);
            if (!(err <= 1.0)) {
                // rejected (also covers NaN error from pole overshoot)
                const double fac11 =
                    std::isfinite(err) ? std::pow(err, 0.125) : 10.0;
                h = hs / std::min(kFacc1, fac11 / kSafe);
                last_rejected = true;
                continue;
            }

            const double t_new = clipped ? cfg_.t_end : t + hs;
            sample_range(traj, t, hs, t_new);

            check_pole(ynew_, t_new, cfg_.pole_margin);
            y = ynew_;
            f0 = fnew_;
            t = t_new;

            double fac11 = err > 0.0 ? std::pow(err, 0.125) : 0.0;
            double fac = std::max(kFacc2, std::min(kFacc1, fac11 / kSafe));
            double h_next = hs / fac;
            if (last_rejected) h_next = std::min(h_next, hs);
            h = h_next;
            last_rejected = false;
        }

        if (traj.times.empty() || traj.times.back() < cfg_.t_end - 1e-9) {
            check_pole(y, cfg_.t_end, cfg_.pole_margin);
            emit(traj, cfg_.t_end, y);
        }
        return traj;
    }

  private:
    static constexpr long kMaxSteps = 20'000'000;
    static constexpr double kSafe = 0.9;
    static constexpr double kFacc1 = 3.0;       // inverse of the 0.333 shrink cap
    static constexpr double kFacc2 = 1.0 / 6.0; // inverse of the 6.0 growth cap

    // One trial step of size h from (t, y) with f0 = f(t, y). Fills ynew_,
    // fnew_ and the stage registers; returns the scaled error estimate.
    double attempt(const Vec4& y, const Vec4& f0, double t, double h) {
        using namespace dp853;
        Vec4 w;
        // the flow is autonomous, so stage times never enter the rhs
        auto f = [&](const Vec4& yy) { return rhs_raw(p_, yy); };
        (void)t;

        for (int i = 0; i < 4; ++i) w[i] = y[i] + h * a21 * f0[i];
        k2_ = f(w);
        for (int i = 0; i < 4; ++i)
            w[i] = y[i] + h * (a31 * f0[i] + a32 * k2_[i]);
        k3_ = f(w);
        for (int i = 0; i < 4; ++i)
            w[i] = y[i] + h * (a41 * f0[i] + a43 * k3_[i]);
        k4_ = f(w);
        for (int i = 0; i < 4; ++i)
            w[i] = y[i] + h * (a51 * f0[i] + a53 * k3_[i] + a54 * k4_[i]);
        k5_ = f(w);
        for (int i = 0; i < 4; ++i)
            w[i] = y[i] + h * (a61 * f0[i] + a64 * k4_[i] + a65 * k5_[i]);
        k6_ = f(w);
        for (int i = 0; i < 4; ++i)
            w[i] = y[i] + h * (a71 * f0[i] + a74 * k4_[i] + a75 * k5_[i] +
                               a76 * k6_[i]);
        k7_ = f(w);
        for (int i = 0; i < 4; ++i)
            w[i] = y[i] + h * (a81 * f0[i] + a84 * k4_[i] + a85 * k5_[i] +
                               a86 * k6_[i] + a87 * k7_[i]);
        k8_ = f(w);
        for (int i = 0; i < 4; ++i)
            w[i] = y[i] + h * (a91 * f0[i] + a94 * k4_[i] + a95 * k5_[i] +
                               a96 * k6_[i] + a97 * k7_[i] + a98 * k8_[i]);
        k9_ = f(w);
        for (int i = 0; i < 4; ++i)
            w[i] = y[i] + h * (a101 * f0[i] + a104 * k4_[i] + a105 * k5_[i] +
                               a106 * k6_[i] + a107 * k7_[i] + a108 * k8_[i] +
                               a109 * k9_[i]);
        k10_ = f(w);
        for (int i = 0; i < 4; ++i)
            w[i] = y[i] + h * (a111 * f0[i] + a114 * k4_[i] + a115 * k5_[i] +
                               a116 * k6_[i] + a117 * k7_[i] + a118 * k8_[i] +
                               a119 * k9_[i] + a1110 * k10_[i]);
        k11_ = f(w);
        for (int i = 0; i < 4; ++i)
            w[i] = y[i] + h * (a121 * f0[i] + a124 * k4_[i] + a125 * k5_[i] +
                               a126 * k6_[i] + a127 * k7_[i] + a128 * k8_[i] +
                               a129 * k9_[i] + a1210 * k10_[i] +
                               a1211 * k11_[i]);
        k12_ = f(w);

        for (int i = 0; i < 4; ++i) {
            bsum_[i] = b1 * f0[i] + b6 * k6_[i] + b7 * k7_[i] + b8 * k8_[i] +
                       b9 * k9_[i] + b10 * k10_[i] + b11 * k11_[i] +
                       b12 * k12_[i];
            ynew_[i] = y[i] + h * bsum_[i];
        }

        double err3 = 0.0, err5 = 0.0;
        for (int i = 0; i < 4; ++i) {
            const double sk = cfg_.abs_tol +
                              cfg_.rel_tol *
                                  std::max(std::abs(y[i]), std::abs(ynew_[i]));
            const double e3 =
                bsum_[i] - e31 * f0[i] - e32 * k9_[i] - e33 * k12_[i];
            const double e5 = e51 * f0[i] + e56 * k6_[i] + e57 * k7_[i] +
                              e58 * k8_[i] + e59 * k9_[i] + e510 * k10_[i] +
                              e511 * k11_[i] + e512 * k12_[i];
            err3 += (e3 / sk) * (e3 / sk);
            err5 += (e5 / sk) * (e5 / sk);
        }
        double deno = err5 + 0.01 * err3;
        if (deno <= 0.0) deno = 1.0;
        const double err = std::abs(h) * err5 * std::sqrt(1.0 / (4.0 * deno));

        if (std::isfinite(err) && err <= 1.0) {
            fnew_ = rhs_raw(p_, ynew_);
            if (!finite(fnew_))
                return std::numeric_limits<double>::quiet_NaN();
            yold_ = y;
            fold_ = f0;
        }
        return err;
    }

    // Emits every pending sample that falls inside the accepted step
    // (t_old, t_new]. Dense coefficients are built lazily since they need
    // three extra derivative evaluations.
    void sample_range(Trajectory& traj, double t_old, double h, double t_new) {
        bool have_dense = false;
        while (true) {
            const double tq = next_sample_ * cfg_.sample_interval;
            if (tq > t_new + 1e-12 || tq > cfg_.t_end + 1e-12) break;
            Vec4 yq;
            if (std::abs(tq - t_new) <= 1e-12 * std::max(1.0, std::abs(t_new))) {
                yq = ynew_;
            } else {
                if (!have_dense) {
                    build_dense(t_old, h);
                    have_dense = true;
                }
                const double s = (tq - t_old) / h;
                const double s1 = 1.0 - s;
                for (int i = 0; i < 4; ++i)
                    yq[i] = r1_[i] +
                            s * (r2_[i] +
                                 s1 * (r3_[i] +
                                       s * (r4_[i] +
                                            s1 * (r5_[i] +
                                                  s * (r6_[i] +
                                                       s1 * (r7_[i] +
                                                             s * r8_[i]))))));
            }
            check_pole(yq, tq, cfg_.pole_margin);
            emit(traj, tq, yq);
            ++next_sample_;
        }
    }

    void build_dense(double t, double h) {
        using namespace dp853;
        const Vec4& y = yold_;
        const Vec4& f0 = fold_;
        Vec4 w, k14, k15, k16;

        for (int i = 0; i < 4; ++i) {
            r1_[i] = y[i];
            const double ydiff = ynew_[i] - y[i];
            r2_[i] = ydiff;
            const double bspl = h * f0[i] - ydiff;
            r3_[i] = bspl;
            r4_[i] = ydiff - h * fnew_[i] - bspl;
            r5_[i] = d41 * f0[i] + d46 * k6_[i] + d47 * k7_[i] + d48 * k8_[i] +
                     d49 * k9_[i] + d410 * k10_[i] + d411 * k11_[i] +
                     d412 * k12_[i];
            r6_[i] = d51 * f0[i] + d56 * k6_[i] + d57 * k7_[i] + d58 * k8_[i] +
                     d59 * k9_[i] + d510 * k10_[i] + d511 * k11_[i] +
                     d512 * k12_[i];
            r7_[i] = d61 * f0[i] + d66 * k6_[i] + d67 * k7_[i] + d68 * k8_[i] +
                     d69 * k9_[i] + d610 * k10_[i] + d611 * k11_[i] +
                     d612 * k12_[i];
            r8_[i] = d71 * f0[i] + d76 * k6_[i] + d77 * k7_[i] + d78 * k8_[i] +
                     d79 * k9_[i] + d710 * k10_[i] + d711 * k11_[i] +
                     d712 * k12_[i];
        }

        for (int i = 0; i < 4; ++i)
            w[i] = y[i] + h * (a141 * f0[i] + a147 * k7_[i] + a148 * k8_[i] +
                               a149 * k9_[i] + a1410 * k10_[i] +
                               a1411 * k11_[i] + a1412 * k12_[i] +
                               a1413 * fnew_[i]);
        k14 = rhs_raw(p_, w);
        for (int i = 0; i < 4; ++i)
            w[i] = y[i] + h * (a151 * f0[i] + a156 * k6_[i] + a157 * k7_[i] +
                               a158 * k8_[i] + a1511 * k11_[i] +
                               a1512 * k12_[i] + a1513 * fnew_[i] +
                               a1514 * k14[i]);
        k15 = rhs_raw(p_, w);
        for (int i = 0; i < 4; ++i)
            w[i] = y[i] + h * (a161 * f0[i] + a166 * k6_[i] + a167 * k7_[i] +
                               a168 * k8_[i] + a169 * k9_[i] +
                               a1613 * fnew_[i] + a1614 * k14[i] +
                               a1615 * k15[i]);
        k16 = rhs_raw(p_, w);

        for (int i = 0; i < 4; ++i) {
            r5_[i] = h * (r5_[i] + d413 * fnew_[i] + d414 * k14[i] +
                          d415 * k15[i] + d416 * k16[i]);
            r6_[i] = h * (r6_[i] + d513 * fnew_[i] + d514 * k14[i] +
                          d515 * k15[i] + d516 * k16[i]);
            r7_[i] = h * (r7_[i] + d613 * fnew_[i] + d614 * k14[i] +
                          d615 * k15[i] + d616 * k16[i]);
            r8_[i] = h * (r8_[i] + d713 * fnew_[i] + d714 * k14[i] +
                          d715 * k15[i] + d716 * k16[i]);
        }
        (void)t;
    }

    double initial_step(const Vec4& y, const Vec4& f0) const {
        double dnf = 0.0, dny = 0.0;
        for (int i = 0; i < 4; ++i) {
            const double sk = cfg_.abs_tol + cfg_.rel_tol * std::abs(y[i]);
            dnf += (f0[i] / sk) * (f0[i] / sk);
            dny += (y[i] / sk) * (y[i] / sk);
        }
        double h = (dnf <= 1e-10 || dny <= 1e-10)
                       ? 1e-6
                       : std::sqrt(dny / dnf) * 0.01;
        h = std::min(h, cfg_.max_step);

        Vec4 y1;
        for (int i = 0; i < 4; ++i) y1[i] = y[i] + h * f0[i];
        const Vec4 f1 = rhs_raw(p_, y1);
        if (!finite(f1)) return std::min(1e-6, cfg_.max_step);

        double der2 = 0.0;
        for (int i = 0; i < 4; ++i) {
            const double sk = cfg_.abs_tol + cfg_.rel_tol * std::abs(y[i]);
            der2 += ((f1[i] - f0[i]) / sk) * ((f1[i] - f0[i]) / sk);
        }
        der2 = std::sqrt(der2) / h;
        const double der12 = std::max(der2, std::sqrt(dnf));
        const double h1 = der12 <= 1e-15
                              ? std::max(1e-6, h * 1e-3)
                              : std::pow(0.01 / der12, 0.125);
        return std::min({100.0 * h, h1, cfg_.max_step});
    }

    void emit(Trajectory& traj, double t, const Vec4& y) const {
        traj.times.push_back(t);
        traj.states.push_back(to_state(y));
        traj.energies.push_back(hamiltonian(p_, traj.states.back()));
    }

    const ModelParams& p_;
    const IntegratorConfig& cfg_;
    long next_sample_ = 1;
    Vec4 k2_{}, k3_{}, k4_{}, k5_{}, k6_{}, k7_{}, k8_{}, k9_{}, k10_{},
        k11_{}, k12_{};
    Vec4 bsum_{}, ynew_{}, fnew_{}, yold_{}, fold_{};
    Vec4 r1_{}, r2_{}, r3_{}, r4_{}, r5_{}, r6_{}, r7_{}, r8_{};
};

}  // namespace

void IntegratorConfig::validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || !(max_step > 0.0) ||
        !(sample_interval > 0.0) || !(t_end > 0.0) || !(pole_margin > 0.0))
        throw ConfigError("integrator settings must all be positive");
    if (rel_tol > 1e-6 || abs_tol > 1e-6)
        throw ConfigError("integration tolerances must be at most 1e-6");
}

Trajectory integrate(const ModelParams& p, const State& s0,
                     const IntegratorConfig& cfg) {
    p.validate();
    s0.validate();
    cfg.validate();
    return Dop853(p, cfg).run(s0);
}

Trajectory reference_integrate(const ModelParams& p, const State& s0,
                               double step, double t_end,
                               double sample_interval, double pole_margin) {
    p.validate();
    s0.validate();
    if (!(step > 0.0) || step > 1e-4)
        throw ConfigError("reference integrator requires 0 < step <= 1e-4");
    if (!(t_end > 0.0)) throw ConfigError("t_end must be positive");

    const long n_steps = std::lround(t_end / step);
    const long stride =
        sample_interval <= 0.0
            ? 1
            : std::max<long>(1, std::lround(sample_interval / step));

    Trajectory traj;
    traj.params = p;
    Vec4 y = to_vec(s0);
    check_pole(y, 0.0, pole_margin);
    traj.times.push_back(0.0);
    traj.states.push_back(s0);
    traj.energies.push_back(hamiltonian(p, s0));

    for (long n = 0; n < n_steps; ++n) {
        const double t = n * step;
        const Vec4 k1 = rhs_raw(p, y);
        Vec4 w;
        for (int i = 0; i < 4; ++i) w[i] = y[i] + 0.5 * step * k1[i];
        const Vec4 k2 = rhs_raw(p, w);
        for (int i = 0; i < 4; ++i) w[i] = y[i] + 0.5 * step * k2[i];
        const Vec4 k3 = rhs_raw(p, w);
        for (int i = 0; i < 4; ++i) w[i] = y[i] + step * k3[i];
        const Vec4 k4 = rhs_raw(p, w);
        for (int i = 0; i < 4; ++i)
            y[i] += step / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

        const double t_new = (n + 1) * step;
        check_pole(y, t_new, pole_margin);
        if ((n + 1) % stride == 0 || n + 1 == n_steps) {
            traj.times.push_back(t_new);
            traj.states.push_back(to_state(y));
            traj.energies.push_back(hamiltonian(p, traj.states.back()));
        }
    }
    return traj;
}

}  // namespace bjj
