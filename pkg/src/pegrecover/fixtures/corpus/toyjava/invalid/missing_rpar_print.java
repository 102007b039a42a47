public class Main {
  public static void main(String[] args) {
    int g = 7;
    System.out.println(g;
  }
}
