#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fcm/datagen.hpp"
#include "fcm/dataset.hpp"
#include "fcm/oracle.hpp"

using namespace fcm;

TEST_CASE("parse_distribution reads every family and round-trips") {
    const auto z = parse_distribution("zipf:1.5");
    REQUIRE(z.k == distribution_spec::kind::zipf);
    REQUIRE(z.p1 == 1.5);
    const auto g = parse_distribution("gaussian:100,50");
    REQUIRE(g.k == distribution_spec::kind::gaussian);
    REQUIRE(g.p1 == 100.0);
    REQUIRE(g.p2 == 50.0);
    const auto e = parse_distribution("exponential:0.01");
    REQUIRE(e.k == distribution_spec::kind::exponential);
    const auto u = parse_distribution("uniform:1,9");
    REQUIRE(u.k == distribution_spec::kind::uniform);
    REQUIRE(to_string(g) == "gaussian:100,50");
    REQUIRE(parse_distribution(to_string(z)).p1 == z.p1);
}

TEST_CASE("parse_distribution rejects malformed specs") {
    REQUIRE_THROWS_AS(parse_distribution("cauchy:1"), std::invalid_argument);
    REQUIRE_THROWS_AS(parse_distribution("zipf"), std::invalid_argument);
    REQUIRE_THROWS_AS(parse_distribution("gaussian:5"), std::invalid_argument);
    REQUIRE_THROWS_AS(parse_distribution("zipf:-1"), std::invalid_argument);
    REQUIRE_THROWS_AS(parse_distribution("uniform:9,1"), std::invalid_argument);
    REQUIRE_THROWS_AS(parse_distribution("exponential:0"), std::invalid_argument);
}

TEST_CASE("degenerate uniform range pins every frequency") {
    const auto f = gen_frequencies(parse_distribution("uniform:5,5"), 200, 3);
    REQUIRE(f.size() == 200);
    for (auto v : f) REQUIRE(v == 5);
}

TEST_CASE("gaussian frequencies concentrate around the mean") {
    const auto f = gen_frequencies(parse_distribution("gaussian:100,50"), 10000, 9);
    double mean = 0.0;
    for (auto v : f) {
        REQUIRE(v >= 1);
        mean += static_cast<double>(v);
    }
    mean /= 10000.0;
    REQUIRE(mean > 98.0);
    REQUIRE(mean < 102.0);
}

TEST_CASE("zipf frequencies follow the rank law at the top") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        auto f = gen_frequencies(parse_distribution("zipf:1.0"), 1000, seed);
        std::uint64_t top = 0, second = 0;
        for (auto v : f) {
            if (v >= top) {
                second = top;
                top = v;
            } else if (v > second) {
                second = v;
            }
        }
        const double ratio = static_cast<double>(top) / static_cast<double>(second);
        REQUIRE(ratio > 2.0 * 0.85);
        REQUIRE(ratio < 2.0 * 1.15);
    }
}

TEST_CASE("frequency generation is reproducible per seed") {
    const auto spec = parse_distribution("exponential:0.05");
    REQUIRE(gen_frequencies(spec, 500, 11) == gen_frequencies(spec, 500, 11));
    REQUIRE(gen_frequencies(spec, 500, 11) != gen_frequencies(spec, 500, 12));
}

TEST_CASE("group_by_threshold splits strictly below the cut") {
    const std::vector<std::uint64_t> freqs{10, 1000};
    REQUIRE(group_by_threshold(freqs, 100) == std::vector<std::uint32_t>{0, 1});
    // threshold of zero: nothing is below it
    REQUIRE(group_by_threshold(freqs, 0) == std::vector<std::uint32_t>{1, 1});
    // threshold above the maximum: everything is below it
    REQUIRE(group_by_threshold(freqs, 1001) == std::vector<std::uint32_t>{0, 0});
    REQUIRE(group_by_threshold({100}, 100) == std::vector<std::uint32_t>{1});
}

TEST_CASE("group_equi_width with two groups cuts at the midpoint") {
    std::vector<std::uint64_t> freqs;
    for (std::uint64_t v = 10; v <= 90; v += 5) freqs.push_back(v);
    REQUIRE(group_equi_width(freqs, 2) == group_by_threshold(freqs, 50));
}

TEST_CASE("group_equi_width places interval boundaries evenly") {
    std::vector<std::uint64_t> freqs;
    for (std::uint64_t v = 1; v <= 100; ++v) freqs.push_back(v);
    const auto labels = group_equi_width(freqs, 4);
    // spans [1,100] split in four: cut points fall between 25/26, 50/51, 75/76
    REQUIRE(labels[24] == 0);
    REQUIRE(labels[25] == 1);
    REQUIRE(labels[49] == 1);
    REQUIRE(labels[50] == 2);
    REQUIRE(labels[74] == 2);
    REQUIRE(labels[75] == 3);
    REQUIRE(labels[99] == 3);
    for (auto l : labels) REQUIRE(l < 4);
}

TEST_CASE("group_equi_width puts identical frequencies into one group") {
    const std::vector<std::uint64_t> freqs{7, 7, 7, 7};
    REQUIRE(group_equi_width(freqs, 3) == std::vector<std::uint32_t>{0, 0, 0, 0});
}

TEST_CASE("group_lowest_n takes exactly the n smallest with index ties") {
    const std::vector<std::uint64_t> freqs{5, 2, 9, 2, 7};
    const auto labels = group_lowest_n(freqs, 3);
    REQUIRE(labels == std::vector<std::uint32_t>{0, 0, 1, 0, 1});
    REQUIRE_THROWS_AS(group_lowest_n(freqs, 6), std::invalid_argument);
}

TEST_CASE("make_dataset compacts group ids by first appearance") {
    const std::vector<std::uint64_t> freqs{4, 6, 8};
    const std::vector<std::uint32_t> labels{2, 0, 2};
    const auto data = make_dataset(freqs, labels, {"a", "b", "c"});
    REQUIRE(data.group_names == std::vector<std::string>{"c", "a"});
    REQUIRE(data.records[0].group == 0);
    REQUIRE(data.records[1].group == 1);
    REQUIRE(data.records[2].group == 0);
    REQUIRE(data.records[0].key == "e0");
}

TEST_CASE("two-population datasets carry their group names and sizes") {
    const auto data = make_two_population_dataset(parse_distribution("gaussian:100,50"), 30,
                                                  parse_distribution("gaussian:1000,500"), 20, 5);
    REQUIRE(data.group_names == std::vector<std::string>{"low", "high"});
    frequency_oracle oracle(data);
    REQUIRE(oracle.group_elements(0) == 30);
    REQUIRE(oracle.group_elements(1) == 20);
    // reproducible
    const auto again = make_two_population_dataset(parse_distribution("gaussian:100,50"), 30,
                                                   parse_distribution("gaussian:1000,500"), 20, 5);
    for (std::size_t i = 0; i < data.records.size(); ++i) {
        REQUIRE(data.records[i].count == again.records[i].count);
    }
}

TEST_CASE("dataset CSV writing is byte-identical per seed") {
    const auto freqs = gen_frequencies(parse_distribution("zipf:1.1"), 40, 8);
    const auto data = make_dataset(freqs, group_equi_width(freqs, 2), {"g0", "g1"});
    std::ostringstream a, b;
    write_dataset_csv(a, data);
    write_dataset_csv(b, data);
    REQUIRE(a.str() == b.str());
    REQUIRE(a.str().rfind("element,group,count\n", 0) == 0);
}

TEST_CASE("dataset CSVs round-trip through write and read") {
    const auto data = make_two_population_dataset(parse_distribution("gaussian:100,50"), 25,
                                                  parse_distribution("gaussian:1000,500"), 15, 7);
    std::ostringstream out;
    write_dataset_csv(out, data);
    std::istringstream in(out.str());
    const auto back = read_dataset_csv(in);
    REQUIRE(back.group_names == data.group_names);
    REQUIRE(back.records.size() == data.records.size());
    frequency_oracle a(data), b(back);
    REQUIRE(a.total_mass() == b.total_mass());
    REQUIRE(a.group_mass(0) == b.group_mass(0));
    REQUIRE(a.group_mass(1) == b.group_mass(1));
    for (const auto& e : a.entries()) {
        REQUIRE(b.lookup(e.key).frequency == e.frequency);
        REQUIRE(b.lookup(e.key).group == e.group);
    }
}

TEST_CASE("ingest_csv aggregates repeated keys") {
    std::istringstream in("user,org\nu1,acme\nu1,acme\nu1,acme\nu2,acme\n");
    ingest_options opt;
    opt.key_columns = {"user"};
    opt.group_column = "org";
    const auto data = ingest_csv(in, opt);
    frequency_oracle oracle(data);
    REQUIRE(oracle.lookup("u1").frequency == 3);
    REQUIRE(oracle.lookup("u2").frequency == 1);
    REQUIRE(oracle.elements() == 2);
}

TEST_CASE("ingest_csv honours an explicit count column") {
    std::istringstream in("item,grp,hits\na,x,7\nb,x,2\na,x,3\n");
    ingest_options opt;
    opt.key_columns = {"item"};
    opt.group_column = "grp";
    opt.count_column = "hits";
    const auto data = ingest_csv(in, opt);
    frequency_oracle oracle(data);
    REQUIRE(oracle.lookup("a").frequency == 10);
    REQUIRE(oracle.lookup("b").frequency == 2);
}

TEST_CASE("ingest_csv matches a hand-tallied fixture") {
    // ten rows, two key columns, mixed groups and counts
    const std::string text =
        "first,last,team,n\n"
        "ann,lee,red,2\n"
        "bob,ray,blue,1\n"
        "ann,lee,red,3\n"
        "cyd,oak,red,1\n"
        "bob,ray,blue,4\n"
        "dee,fox,blue,1\n"
        "ann,lee,red,1\n"
        "eve,ash,red,2\n"
        "cyd,oak,red,2\n"
        "dee,fox,blue,3\n";
    std::istringstream in(text);
    ingest_options opt;
    opt.key_columns = {"first", "last"};
    opt.group_column = "team";
    opt.count_column = "n";
    const auto data = ingest_csv(in, opt);
    frequency_oracle oracle(data);
    // hand tally: ann|lee 6, bob|ray 5, cyd|oak 3, dee|fox 4, eve|ash 2
    REQUIRE(oracle.elements() == 5);
    REQUIRE(oracle.total_mass() == 20);
    REQUIRE(oracle.lookup("ann|lee").frequency == 6);
    REQUIRE(oracle.lookup("bob|ray").frequency == 5);
    REQUIRE(oracle.lookup("cyd|oak").frequency == 3);
    REQUIRE(oracle.lookup("dee|fox").frequency == 4);
    REQUIRE(oracle.lookup("eve|ash").frequency == 2);
    REQUIRE(oracle.group_name(oracle.lookup("ann|lee").group) == "red");
    REQUIRE(oracle.group_mass(oracle.lookup("ann|lee").group) == 11);
    REQUIRE(oracle.group_mass(oracle.lookup("bob|ray").group) == 9);
}

TEST_CASE("ingest_csv rejects a key that changes group") {
    std::istringstream in("k,g\nx,red\nx,blue\n");
    ingest_options opt;
    opt.key_columns = {"k"};
    opt.group_column = "g";
    REQUIRE_THROWS_AS(ingest_csv(in, opt), std::runtime_error);
}

TEST_CASE("ingest_csv reports missing columns and bad rows by line") {
    ingest_options opt;
    opt.key_columns = {"k"};
    opt.group_column = "g";
    {
        std::istringstream in("a,b\n1,2\n");
        try {
            ingest_csv(in, opt);
            FAIL("expected runtime_error");
        } catch (const std::runtime_error& e) {
            REQUIRE(std::string(e.what()).find("k") != std::string::npos);
        }
    }
    {
        std::istringstream in("k,g\nx,red\nonlyonefield\n");
        try {
            ingest_csv(in, opt);
            FAIL("expected runtime_error");
        } catch (const std::runtime_error& e) {
            REQUIRE(std::string(e.what()).find("3") != std::string::npos);
        }
    }
    {
        std::istringstream in("k,g,c\nx,red,notanumber\n");
        ingest_options o2 = opt;
        o2.count_column = "c";
        REQUIRE_THROWS_AS(ingest_csv(in, o2), std::runtime_error);
    }
}

TEST_CASE("csv fields with commas and quotes survive a round-trip") {
    stream_dataset data;
    data.group_names = {"g,one", "g\"two\""};
    data.records.push_back({"a,b", 0, 3});
    data.records.push_back({"c\"d\"", 1, 4});
    std::ostringstream out;
    write_dataset_csv(out, data);
    std::istringstream in(out.str());
    const auto back = read_dataset_csv(in);
    REQUIRE(back.group_names == data.group_names);
    REQUIRE(back.records[0].key == "a,b");
    REQUIRE(back.records[1].key == "c\"d\"");
    REQUIRE(back.records[1].count == 4);
}
